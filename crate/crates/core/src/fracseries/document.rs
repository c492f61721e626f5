//! JSON form of a series: α, the pruning interval and an ordered list of
//! `{const_part, alpha_mult, coefficient}` records. The rational part is a
//! string such as `"3/2"` so that it round-trips exactly.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::{AlphaExponent, SampleDomain, SeriesError, TimePowerSeries};
use crate::expr::{parse, ExprError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermDocument {
    pub const_part: String,
    pub alpha_mult: u32,
    pub coefficient: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDocument {
    pub alpha: f64,
    pub domain: [f64; 2],
    pub terms: Vec<TermDocument>,
}

impl From<&TimePowerSeries> for SeriesDocument {
    fn from(s: &TimePowerSeries) -> Self {
        SeriesDocument {
            alpha: s.alpha(),
            domain: [s.domain().lo, s.domain().hi],
            terms: s
                .terms()
                .iter()
                .map(|t| TermDocument {
                    const_part: t.exponent.const_part.to_string(),
                    alpha_mult: t.exponent.alpha_mult,
                    coefficient: t.coeff.to_string(),
                })
                .collect(),
        }
    }
}

impl SeriesDocument {
    pub fn to_series(&self) -> Result<TimePowerSeries, SeriesError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let q: Rational64 = t.const_part.parse().map_err(|_| ExprError::Syntax {
                offset: 0,
                message: format!("bad rational exponent `{}`", t.const_part),
            })?;
            terms.push((AlphaExponent::new(q, t.alpha_mult), parse(&t.coefficient)?));
        }
        Ok(TimePowerSeries::from_terms(
            self.alpha,
            SampleDomain::new(self.domain[0], self.domain[1]),
            terms,
        ))
    }
}

impl TimePowerSeries {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SeriesDocument::from(self)).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<TimePowerSeries, SeriesError> {
        let doc: SeriesDocument = serde_json::from_str(text).map_err(|e| ExprError::Syntax {
            offset: e.column(),
            message: e.to_string(),
        })?;
        doc.to_series()
    }
}
