//! Sandwiched Rényi α-entropy between Gaussian states, `0 < α < 1`.
//!
//! `σ` is brought to the thermal form `ρ(s)` by a Gaussian unitary, which is
//! applied to `ρ` as well (giving `ρ′`). With `K = diag(e^{-s_j(1-α)/(2α)})`,
//! `σ^{(1-α)/(2α)} ∝ Γ(K)`, so the sandwiched operator is proportional to
//! `Z = Γ(K) ρ′ Γ(K)`, a positive E₂ operator. `Z / Tr Z` is Gaussian with
//! thermal parameters `t_Z`, which yields
//!
//! ```text
//! T_α = p(s)^{1-α} · p(t_Z)^α / p(α t_Z) · (Tr Z)^α,   D̃_α = ln T_α / (α - 1).
//! ```

use serde::{Deserialize, Serialize};

use crate::e2::{
    gamma_sandwich, ln_trace_positive_e2, m_matrix, m_offset, state_to_e2, ASign, DiagonalContraction, MIN_EIG,
};
use crate::error::{Error, Result};
use crate::gaussian::{ensure_physical, GaussianState, ThermalSpec};
use crate::linalg::{max_abs, symmetrize, Spd};
use crate::williamson::{excess_to_t, symplectic_eigenvalues, symplectic_excess, williamson_decompose, PURE_TOL};

/// Relative tolerance of the internal check that the reducing map sends `σ` to `ρ(s)`.
pub const TOL_REDUCTION: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub alpha: f64,
    pub divergence: f64,
    #[serde(rename = "T_alpha")]
    pub t_alpha: f64,
    #[serde(rename = "trace_Z")]
    pub trace_z: f64,
    #[serde(with = "thermal_serde")]
    pub s: Vec<f64>,
    #[serde(rename = "t_Z", with = "thermal_serde")]
    pub t_z: Vec<f64>,
    pub p_s: f64,
    #[serde(rename = "p_tZ")]
    pub p_tz: f64,
    #[serde(rename = "p_alpha_tZ")]
    pub p_alpha_tz: f64,
}

/// Thermal parameters as JSON numbers, with `"inf"` for infinite entries.
pub mod thermal_serde {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::Value;

    pub fn to_value(x: f64) -> Value {
        if x.is_infinite() && x > 0.0 {
            Value::String("inf".into())
        } else {
            serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
    }

    pub fn from_value(v: &Value) -> Option<f64> {
        match v {
            Value::Number(n) => n.as_f64(),
            Value::String(s) if s == "inf" || s == "Infinity" => Some(f64::INFINITY),
            _ => None,
        }
    }

    pub fn serialize<S: Serializer>(t: &[f64], ser: S) -> Result<S::Ok, S::Error> {
        t.iter().map(|&x| to_value(x)).collect::<Vec<_>>().serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<f64>, D::Error> {
        let raw = Vec::<Value>::deserialize(de)?;
        raw.iter()
            .map(|v| from_value(v).ok_or_else(|| D::Error::custom(format!("bad thermal parameter {v}"))))
            .collect()
    }
}

impl EntropyReport {
    pub fn s_spec(&self) -> Result<ThermalSpec> {
        ThermalSpec::new(self.s.clone())
    }

    pub fn t_z_spec(&self) -> Result<ThermalSpec> {
        ThermalSpec::new(self.t_z.clone())
    }
}

/// `ln(1 - e^{-t})`, zero for `t = ∞`.
fn ln_p1(t: f64) -> f64 {
    if t.is_infinite() {
        0.0
    } else {
        (-(-t).exp()).ln_1p()
    }
}

/// `ln p(t) = Σ ln(1 - e^{-t_j})`.
pub fn ln_p_of(t: &ThermalSpec) -> f64 {
    t.values().iter().map(|&x| ln_p1(x)).sum()
}

/// `p(t) = Π (1 - e^{-t_j})`.
pub fn p_of(t: &ThermalSpec) -> f64 {
    ln_p_of(t).exp()
}

/// `K = diag(e^{-s_j(1-α)/(2α)})`.
pub fn k_matrix(s: &ThermalSpec, alpha: f64) -> Result<DiagonalContraction> {
    check_alpha(alpha)?;
    let exponent = (1.0 - alpha) / (2.0 * alpha);
    let mut k = Vec::with_capacity(s.len());
    for (mode, &sj) in s.values().iter().enumerate() {
        if sj.is_infinite() {
            return Err(Error::NotFaithful { mode, d: 0.5 });
        }
        k.push((-sj * exponent).exp());
    }
    DiagonalContraction::new(k)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

/// `σ` in thermal form together with the correspondingly transformed `ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub rho_prime: GaussianState,
    pub s: ThermalSpec,
    /// Modes of `ρ` with `d - ½ ≤ PURE_TOL`.
    pub pure_modes: usize,
}

/// Applies the Gaussian unitary that maps `σ` to `ρ(s)` to both states.
///
/// Covariances transform as `S ↦ LᵀSL` and means as `m ↦ L⁻¹(m - m_σ)`, with
/// `L` from the Williamson decomposition of `σ`.
pub fn reduce_sigma(rho: &GaussianState, sigma: &GaussianState) -> Result<Reduction> {
    if rho.modes() != sigma.modes() {
        return Err(Error::Shape(format!(
            "rho has {} modes, sigma has {}",
            rho.modes(),
            sigma.modes()
        )));
    }
    ensure_physical(rho, "rho")?;
    ensure_physical(sigma, "sigma")?;
    let w = williamson_decompose(sigma.cov())?;
    for (mode, &d) in w.d.iter().enumerate() {
        if d - 0.5 <= PURE_TOL {
            return Err(Error::NotFaithful { mode, d });
        }
    }
    let l = w.l.matrix();
    let check = max_abs(&(l.transpose() * sigma.cov() * l - w.normal_form()));
    let scale = 1.0 + max_abs(sigma.cov());
    if check > TOL_REDUCTION * scale {
        return Err(Error::Degenerate(format!(
            "reducing map leaves |LᵀSσL - D| = {check:.3e}"
        )));
    }
    let cov = l.transpose() * rho.cov() * l;
    let cov = (&cov + cov.transpose()) * 0.5;
    let mean = w.l.inverse() * (rho.mean() - sigma.mean());
    let pure_modes = symplectic_eigenvalues(rho.cov())?
        .iter()
        .filter(|&&d| d - 0.5 <= PURE_TOL)
        .count();
    Ok(Reduction {
        rho_prime: GaussianState::new(mean, cov)?,
        s: w.t,
        pure_modes,
    })
}

pub fn sandwiched_renyi(rho: &GaussianState, sigma: &GaussianState, alpha: f64) -> Result<EntropyReport> {
    check_alpha(alpha)?;
    let red = reduce_sigma(rho, sigma)?;
    renyi_from_reduction(&red, alpha)
}

/// One report per `α`, in input order; the reduction of `σ` is computed once.
pub fn sandwiched_renyi_sweep(
    rho: &GaussianState,
    sigma: &GaussianState,
    alphas: &[f64],
) -> Result<Vec<EntropyReport>> {
    if alphas.is_empty() {
        return Ok(Vec::new());
    }
    for &a in alphas {
        check_alpha(a)?;
    }
    let red = reduce_sigma(rho, sigma)?;
    alphas.iter().map(|&a| renyi_from_reduction(&red, a)).collect()
}

/// Parameters of `Z = Γ(K) ρ′ Γ(K)` and `ln Tr Z`.
pub fn z_operator(red: &Reduction, alpha: f64) -> Result<(crate::e2::E2Quadruple, f64)> {
    let k = k_matrix(&red.s, alpha)?;
    let z = gamma_sandwich(&state_to_e2(&red.rho_prime)?, &k)?;
    let ln_tr = ln_trace_positive_e2(&z)?;
    Ok((z, ln_tr))
}

pub fn renyi_from_reduction(red: &Reduction, alpha: f64) -> Result<EntropyReport> {
    check_alpha(alpha)?;
    let (z, ln_tr_z) = z_operator(red, alpha)?;

    // S_Z = M(-A′,Λ′)⁻¹ - ½I = ½I + N + N M⁻¹ N with N = I - M.
    let m = m_matrix(z.a(), z.lambda(), ASign::Minus)?;
    let spd = Spd::new(m.matrix(), MIN_EIG).map_err(Error::NotNormalizable)?;
    let offset = m_offset(z.a(), z.lambda(), ASign::Minus)?;
    let e = &offset + &offset * spd.inverse() * &offset;
    let mut excess = symplectic_excess(&symmetrize(&e))?;
    // Γ(K) is invertible, so Z has exactly as many pure modes as ρ; their
    // computed excess is rounding noise that αt_Z would amplify.
    for x in excess.iter_mut().take(red.pure_modes) {
        *x = 0.0;
    }
    let t_z = ThermalSpec::from_unsorted(excess.iter().map(|&x| excess_to_t(x)).collect())?;
    let alpha_t_z = t_z.scaled(alpha)?;

    let ln_p_s = ln_p_of(&red.s);
    let ln_p_tz = ln_p_of(&t_z);
    let ln_p_atz = ln_p_of(&alpha_t_z);
    let ln_t = (1.0 - alpha) * ln_p_s + alpha * ln_p_tz - ln_p_atz + alpha * ln_tr_z;

    Ok(EntropyReport {
        alpha,
        divergence: ln_t / (alpha - 1.0),
        t_alpha: ln_t.exp(),
        trace_z: ln_tr_z.exp(),
        s: red.s.values().to_vec(),
        t_z: t_z.values().to_vec(),
        p_s: ln_p_s.exp(),
        p_tz: ln_p_tz.exp(),
        p_alpha_tz: ln_p_atz.exp(),
    })
}
