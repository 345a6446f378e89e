//! Parameter records and the physical-to-nondimensional map.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Result, WgssError};
use crate::model::epsilon_critical;

/// Nondimensional parameters `(beta, alpha, epsilon, kappa)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WgssParams {
    pub beta: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub kappa: f64,
}

fn check(ok: bool, what: &str, v: f64) -> Result<()> {
    if ok && v.is_finite() {
        Ok(())
    } else {
        Err(WgssError::Domain(format!("{what} = {v}")))
    }
}

impl WgssParams {
    /// Validates `beta in (0,1)`, `alpha > 0`, `epsilon > 0`, `kappa in [0,1)`.
    pub fn new(beta: f64, alpha: f64, epsilon: f64, kappa: f64) -> Result<Self> {
        check(beta > 0.0 && beta < 1.0, "beta", beta)?;
        check(alpha > 0.0, "alpha", alpha)?;
        check(epsilon > 0.0, "epsilon", epsilon)?;
        check((0.0..1.0).contains(&kappa), "kappa", kappa)?;
        Ok(Self {
            beta,
            alpha,
            epsilon,
            kappa,
        })
    }

    /// Point on the critical hypersurface `epsilon = epsilon_c(beta, alpha, kappa)`.
    pub fn critical(beta: f64, alpha: f64, kappa: f64) -> Result<Self> {
        check(beta > 0.0 && beta < 1.0, "beta", beta)?;
        check((0.0..1.0).contains(&kappa), "kappa", kappa)?;
        Self::new(beta, alpha, epsilon_critical(beta, alpha, kappa), kappa)
    }

    pub fn with_epsilon(self, epsilon: f64) -> Result<Self> {
        Self::new(self.beta, self.alpha, epsilon, self.kappa)
    }

    pub fn epsilon_c(&self) -> f64 {
        epsilon_critical(self.beta, self.alpha, self.kappa)
    }
}

/// Physical constants of the governor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// ball mass
    pub m: f64,
    /// arm length
    pub l: f64,
    /// friction coefficient
    pub b: f64,
    pub g: f64,
    /// transmission ratio
    pub c: f64,
    /// torque constant
    pub mu: f64,
    /// flywheel inertia
    #[serde(rename = "I")]
    pub inertia: f64,
    /// load torque
    #[serde(rename = "F")]
    pub load: f64,
    /// spring constant
    pub k: f64,
}

impl PhysicalParams {
    /// `sqrt(m l / (2 k l + m g))`, the physical time per unit of `t`.
    pub fn time_scale(&self) -> f64 {
        (self.m * self.l / (2.0 * self.k * self.l + self.m * self.g)).sqrt()
    }

    pub fn nondimensional(&self) -> Result<WgssParams> {
        for (name, v) in [
            ("m", self.m),
            ("l", self.l),
            ("b", self.b),
            ("g", self.g),
            ("c", self.c),
            ("mu", self.mu),
            ("I", self.inertia),
            ("F", self.load),
        ] {
            check(v > 0.0, name, v)?;
        }
        check(self.k >= 0.0, "k", self.k)?;
        let s = self.time_scale();
        let kappa = 2.0 * self.k * self.l / (2.0 * self.k * self.l + self.m * self.g);
        WgssParams::new(
            self.load / self.mu,
            self.c * self.mu / self.inertia * s * s,
            self.b / self.m * s,
            kappa,
        )
    }

    /// `|d Omega_0 / dF|` in physical units.
    pub fn nonuniformity(&self) -> Result<f64> {
        let p = self.nondimensional()?;
        Ok(crate::model::nonuniformity(p.beta, p.kappa) / (self.c * self.mu * self.time_scale()))
    }

    /// Left side of `(b I / m) eta > 1`.
    pub fn vyshnegradskii_ratio(&self) -> Result<f64> {
        Ok(self.b * self.inertia / self.m * self.nonuniformity()?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamSource {
    Nondimensional,
    Physical,
}

/// Parameters read from a file, remembering which form was supplied.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoadedParams {
    pub params: WgssParams,
    pub source: ParamSource,
    pub physical: Option<PhysicalParams>,
}

const PHYSICAL_KEYS: [&str; 9] = ["m", "l", "b", "g", "c", "mu", "I", "F", "k"];

/// Reads `{beta, alpha, epsilon, kappa}` or the nine physical constants.
///
/// In the nondimensional form `"epsilon": "critical"` selects `epsilon_c`.
pub fn params_from_json(v: &Value) -> Result<LoadedParams> {
    let obj = v
        .as_object()
        .ok_or_else(|| WgssError::Config("expected a JSON object".into()))?;
    let nondim = ["beta", "alpha", "kappa"]
        .iter()
        .any(|k| obj.contains_key(*k));
    let phys = PHYSICAL_KEYS.iter().any(|k| obj.contains_key(*k));
    match (nondim, phys) {
        (true, true) => Err(WgssError::Config(
            "both nondimensional and physical keys given".into(),
        )),
        (false, false) => Err(WgssError::Config("no parameter keys found".into())),
        (true, false) => {
            let num = |k: &str| -> Result<f64> {
                obj.get(k)
                    .and_then(Value::as_f64)
                    .ok_or_else(|| WgssError::Config(format!("missing numeric key {k}")))
            };
            let (beta, alpha, kappa) = (num("beta")?, num("alpha")?, num("kappa")?);
            let params = match obj.get("epsilon") {
                Some(Value::String(s)) if s == "critical" => {
                    WgssParams::critical(beta, alpha, kappa)?
                }
                Some(_) => WgssParams::new(beta, alpha, num("epsilon")?, kappa)?,
                None => return Err(WgssError::Config("missing key epsilon".into())),
            };
            Ok(LoadedParams {
                params,
                source: ParamSource::Nondimensional,
                physical: None,
            })
        }
        (false, true) => {
            let p: PhysicalParams =
                serde_json::from_value(v.clone()).map_err(|e| WgssError::Config(e.to_string()))?;
            Ok(LoadedParams {
                params: p.nondimensional()?,
                source: ParamSource::Physical,
                physical: Some(p),
            })
        }
    }
}

pub fn params_from_str(text: &str) -> Result<LoadedParams> {
    let v: Value = serde_json::from_str(text).map_err(|e| WgssError::Config(e.to_string()))?;
    params_from_json(&v)
}
