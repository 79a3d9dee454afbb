//! Built-in algebras, optimal systems and closed-form witnesses, embedded
//! from the JSON files under `fixtures/`.

use crate::error::Error;
use crate::liealg::LieAlgebra;

pub const KDV_JSON: &str = include_str!("../fixtures/kdv.json");
pub const HEAT_JSON: &str = include_str!("../fixtures/heat.json");
pub const KDV_OPTSYS_JSON: &str = include_str!("../fixtures/kdv-optsys.json");
pub const HEAT_OPTSYS_JSON: &str = include_str!("../fixtures/heat-optsys.json");
pub const KDV_CLOSED_FORMS_JSON: &str = include_str!("../fixtures/kdv-closed-forms.json");
pub const HEAT_CLOSED_FORMS_JSON: &str = include_str!("../fixtures/heat-closed-forms.json");

/// Factor order used for the heat algebra's displayed chain matrix.
pub const HEAT_ORDER: [usize; 6] = [4, 5, 3, 1, 2, 6];

pub fn kdv() -> LieAlgebra {
    LieAlgebra::from_json(KDV_JSON).expect("kdv fixture")
}

pub fn heat() -> LieAlgebra {
    LieAlgebra::from_json(HEAT_JSON).expect("heat fixture")
}

/// Resolves `kdv`, `heat` or `abelian-N`.
pub fn builtin_algebra(name: &str) -> Result<LieAlgebra, Error> {
    match name {
        "kdv" => Ok(kdv()),
        "heat" => Ok(heat()),
        _ => {
            if let Some(n) = name.strip_prefix("abelian-").and_then(|s| s.parse::<usize>().ok()) {
                if n > 0 {
                    return Ok(LieAlgebra::abelian(n));
                }
            }
            Err(Error::Field {
                field: "builtin".into(),
                message: format!("unknown builtin algebra '{name}' (expected kdv, heat or abelian-N)"),
            })
        }
    }
}

pub fn builtin_system_json(name: &str) -> Option<&'static str> {
    match name {
        "kdv-optsys" => Some(KDV_OPTSYS_JSON),
        "heat-optsys" => Some(HEAT_OPTSYS_JSON),
        _ => None,
    }
}

pub fn builtin_closed_forms_json(name: &str) -> Option<&'static str> {
    match name {
        "kdv" | "kdv-closed-forms" => Some(KDV_CLOSED_FORMS_JSON),
        "heat" | "heat-closed-forms" => Some(HEAT_CLOSED_FORMS_JSON),
        _ => None,
    }
}

/// Chain order used by default for an algebra: the heat fixture uses
/// [`HEAT_ORDER`], everything else `1..=n`.
pub fn preferred_order(alg: &LieAlgebra) -> Vec<usize> {
    if alg.name() == "heat" && alg == &heat() {
        HEAT_ORDER.to_vec()
    } else {
        (1..=alg.dim()).collect()
    }
}
