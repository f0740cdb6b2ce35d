//! Structural report on a system and which constructions apply to it.

use serde::{Deserialize, Serialize};

use crate::amplify;
use crate::density;
use crate::system::LinearSystem;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub construction: String,
    pub applicable: bool,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemAnalysis {
    pub system: String,
    pub p: u32,
    pub m: usize,
    pub t: usize,
    pub rank: usize,
    pub deg: usize,
    pub shortest_equation: usize,
    /// Only defined for two equations.
    pub minors_generic: Option<bool>,
    pub additive_tuple: bool,
    pub verdicts: Vec<Verdict>,
}

fn verdict(construction: &str, applicable: bool, reason: impl Into<String>) -> Verdict {
    Verdict {
        construction: construction.into(),
        applicable,
        reason: reason.into(),
    }
}

pub fn analyze(system: &LinearSystem) -> SystemAnalysis {
    let m = system.rows();
    let t = system.cols();
    let s = system.shortest_equation_length();
    let minors_generic = (m == 2).then(|| system.minors_generic().unwrap_or(false));
    let additive_tuple = system.contains_additive_tuple();
    let mut verdicts = Vec::new();

    let generic = minors_generic == Some(true);
    let restricted = if m != 2 {
        verdict("restricted-support witness", false, "needs exactly two equations")
    } else if !generic {
        verdict("restricted-support witness", false, "some 2×2 minor is singular")
    } else if additive_tuple {
        verdict("restricted-support witness", false, format!("contains an additive {t}-tuple"))
    } else {
        verdict("restricted-support witness", true, "generic 2×k without an additive k-tuple; witness on F_p^2")
    };
    verdicts.push(restricted);

    let full = if m != 2 || !generic {
        verdict("full-phase witness", false, "needs a generic 2×k system")
    } else if t % 2 == 1 {
        verdict("full-phase witness", true, "odd k: any sample with nonzero density, negated if positive")
    } else {
        verdict("full-phase witness", true, "generic 2×k; random phases on F_p^n for n large enough")
    };
    verdicts.push(full);

    let k = s + 1;
    let lift = if k < 4 || k % 2 == 1 {
        verdict(
            "lifting certificate",
            false,
            format!("shortest equation length {s} gives k = {k}; needs an even k ≥ 4"),
        )
    } else {
        match amplify::find_subsystem(system) {
            Ok((_, cols)) => verdict(
                "lifting certificate",
                true,
                format!("columns {cols:?} carry a generic 2×{k} subsystem and s = k − 1"),
            ),
            Err(e) => verdict("lifting certificate", false, e.to_string()),
        }
    };
    verdicts.push(lift);

    SystemAnalysis {
        system: density::describe(system.space()),
        p: system.p(),
        m,
        t,
        rank: system.rank(),
        deg: system.deg(),
        shortest_equation: s,
        minors_generic,
        additive_tuple,
        verdicts,
    }
}

impl SystemAnalysis {
    pub fn verdict(&self, construction: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.construction == construction)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "system: {}\np: {}\nm: {}\nt: {}\nrank: {}\ndeg: {}\nshortest_equation: {}\n",
            self.system, self.p, self.m, self.t, self.rank, self.deg, self.shortest_equation
        );
        match self.minors_generic {
            Some(g) => s.push_str(&format!("minors_generic: {g}\n")),
            None => s.push_str("minors_generic: n/a (not a 2-equation system)\n"),
        }
        s.push_str(&format!("additive_tuple: {}\n", self.additive_tuple));
        for v in &self.verdicts {
            let tag = if v.applicable { "applicable" } else { "not applicable" };
            s.push_str(&format!("{}: {tag} ({})\n", v.construction, v.reason));
        }
        s
    }
}
