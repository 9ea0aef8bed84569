use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{Check, Report};
use crate::simplicial::SimplicialBase;

use super::cochain::{pullback, transfer_cochain, Coefficient, SimplicialCochain};
use super::covering::CoveringMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sheet {
    pub index: u32,
    pub covering: CoveringMap,
}

/// Coverings `Sigma^i -> B` indexed by distinct Morse indices `i`, all over
/// the same base. Births and deaths are assumed already cancelled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Sheet>", into = "Vec<Sheet>")]
pub struct GradedSheets {
    sheets: Vec<Sheet>,
}

impl TryFrom<Vec<Sheet>> for GradedSheets {
    type Error = Error;

    fn try_from(sheets: Vec<Sheet>) -> Result<Self> {
        GradedSheets::new(sheets)
    }
}

impl From<GradedSheets> for Vec<Sheet> {
    fn from(g: GradedSheets) -> Self {
        g.sheets
    }
}

fn sign(i: u32) -> i64 {
    if i.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl GradedSheets {
    pub fn new(sheets: Vec<Sheet>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for s in &sheets {
            if !seen.insert(s.index) {
                return Err(Error::model("transfer_ops", format!("index {} appears twice", s.index)));
            }
        }
        if let Some(first) = sheets.first() {
            if sheets.iter().any(|s| s.covering.base() != first.covering.base()) {
                return Err(Error::model("transfer_ops", "sheets lie over different bases"));
            }
        }
        Ok(GradedSheets { sheets })
    }

    pub fn sheets(&self) -> &[Sheet] {
        &self.sheets
    }

    pub fn base(&self) -> Option<&SimplicialBase> {
        self.sheets.first().map(|s| s.covering.base())
    }

    /// `sum_i (-1)^i (number of sheets of Sigma^i)` over a base simplex.
    pub fn euler_over(&self, s: &[usize]) -> i64 {
        self.sheets
            .iter()
            .map(|sh| sign(sh.index) * sh.covering.degree_over(s) as i64)
            .sum()
    }
}

/// `p_* = sum_i (-1)^i tr_i`, one cochain per sheet.
pub fn pushdown_alternating<T: Coefficient>(
    sheets: &GradedSheets,
    cochains: &[SimplicialCochain<T>],
) -> Result<SimplicialCochain<T>> {
    if cochains.len() != sheets.sheets().len() {
        return Err(Error::Precondition("one cochain per sheet is required".into()));
    }
    let Some(first) = cochains.first() else {
        return Err(Error::Precondition("no sheets to push down".into()));
    };
    if cochains.iter().any(|c| c.dim() != first.dim()) {
        return Err(Error::Precondition("sheet cochains have different dimensions".into()));
    }
    let mut acc = SimplicialCochain::zero(first.dim());
    for (sh, c) in sheets.sheets().iter().zip(cochains) {
        let tr = transfer_cochain(&sh.covering, c)?;
        acc = acc.add(&tr.scale(&T::from_int(sign(sh.index))))?;
    }
    Ok(acc)
}

/// `p_* p^* c = chi c`, simplex by simplex, exact in the coefficients.
pub fn euler_multiplication_check<T: Coefficient>(sheets: &GradedSheets, c: &SimplicialCochain<T>) -> Result<Report> {
    let pulled: Vec<_> = sheets
        .sheets()
        .iter()
        .map(|sh| pullback(&sh.covering, c))
        .collect::<Result<_>>()?;
    let pushed = pushdown_alternating(sheets, &pulled)?;
    let base = sheets.base().ok_or_else(|| Error::Precondition("no sheets".into()))?;
    let mut r = Report::new("euler_multiplication");
    for s in base.simplices(c.dim()) {
        let chi = sheets.euler_over(s);
        let lhs = pushed.get(s);
        let rhs = T::from_int(chi) * c.get(s);
        let holds = lhs == rhs;
        let mut check = Check::exact(format!("{s:?}"), holds);
        check.lhs = lhs.to_f64();
        check.rhs = rhs.to_f64();
        r.push(check);
    }
    Ok(r)
}

/// The connected `m`-fold cover of the hexagon circle.
pub fn cyclic_cover_of_hexagon(m: usize) -> Result<CoveringMap> {
    if m == 1 {
        return CoveringMap::trivial(&SimplicialBase::circle(6), 1);
    }
    let action: Vec<usize> = (0..6 * m).map(|v| (v + 6) % (6 * m)).collect();
    CoveringMap::from_free_action(SimplicialBase::circle(6 * m), &action, m)
}

/// Graded sheet fixtures over the hexagon circle with their Euler numbers
/// `-1, 0, 2, 3`.
pub fn euler_fixtures() -> Vec<(i64, GradedSheets)> {
    let hex = SimplicialBase::circle(6);
    let trivial = |r: usize| CoveringMap::trivial(&hex, r).expect("trivial cover");
    let cyclic = |m: usize| cyclic_cover_of_hexagon(m).expect("cyclic cover");
    let build = |parts: Vec<(u32, CoveringMap)>| {
        GradedSheets::new(
            parts
                .into_iter()
                .map(|(index, covering)| Sheet { index, covering })
                .collect(),
        )
        .expect("fixture sheets are valid")
    };
    vec![
        (-1, build(vec![(0, trivial(1)), (1, cyclic(2))])),
        (0, build(vec![(0, cyclic(2)), (1, trivial(2))])),
        (2, build(vec![(0, cyclic(3)), (1, trivial(1))])),
        (3, build(vec![(0, cyclic(2)), (2, trivial(1))])),
    ]
}
