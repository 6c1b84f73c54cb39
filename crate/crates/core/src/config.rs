//! JSON run configurations and polynomial sets.
//!
//! ```json
//! {"schema": 1,
//!  "factors": [{"label": "p", "blocks": [1, 1], "weights": [[0.5], [0.5]]},
//!              {"label": "m", "blocks": [2],
//!               "density": [[[[0.7, 0], [0, 0]], [[0, 0], [0.3, 0]]]]}],
//!  "depth": 4, "tolerances": {"psd": 1e-10}, "seed": 7}
//! ```
//!
//! A factor takes either `weights` (diagonal densities), `density` (one
//! matrix per block, entries as `[re, im]`) or neither (normalized trace).
//!
//! Polynomial sets name algebra elements and combine them into words:
//!
//! ```json
//! {"schema": 1,
//!  "elements": {"a": {"factor": "m", "blocks": [[[[0, 0], [1, 0]], [[1, 0], [0, 0]]]]}},
//!  "polynomials": [{"name": "pq",
//!                   "terms": [{"coef": [1, 0], "word": [["p", "e:0:0:0"], ["m", "a"]]}]}]}
//! ```
//!
//! A letter is `[factor label, element]`, where the element is a name from
//! `elements`, `"1"`, or a matrix unit `"e:b:i:j"`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::blockalg::{AlgebraElement, BlockAlgebra, StateSpec, Tolerances};
use crate::error::{Error, Result};
use crate::freefock::FreeFockSpace;
use crate::freerep::{Letter, NCPoly, Term};
use crate::gns::GnsSpace;
use crate::{CMat, C64};

pub const SCHEMA: u32 = 1;

type Complex = [f64; 2];
type Matrix = Vec<Vec<Complex>>;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FactorConfig {
    pub label: String,
    pub blocks: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Vec<Matrix>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    pub factors: Vec<FactorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for RunConfig {
    /// Two copies of `C²` with states `(½, ½)`.
    fn default() -> Self {
        let c2 = |label: &str| FactorConfig {
            label: label.into(),
            blocks: vec![1, 1],
            weights: Some(vec![vec![0.5], vec![0.5]]),
            density: None,
        };
        Self {
            schema: SCHEMA,
            factors: vec![c2("p"), c2("q")],
            depth: None,
            tolerances: Tolerances::default(),
            seed: None,
        }
    }
}

fn check_schema(found: u32) -> Result<()> {
    if found != SCHEMA {
        return Err(Error::Config(format!("schema {found} is not supported (expected {SCHEMA})")));
    }
    Ok(())
}

fn complex(c: &Complex) -> C64 {
    C64::new(c[0], c[1])
}

fn matrix(rows: &Matrix, d: usize, what: &str) -> Result<CMat> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::Config(format!("{what}: expected a {d}×{d} matrix")));
    }
    Ok(CMat::from_fn(d, d, |i, j| complex(&rows[i][j])))
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
    check_schema(cfg.schema)?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.factors.is_empty() {
            return Err(Error::Config("config lists no factors".into()));
        }
        if self.depth == Some(0) {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        let t = &self.tolerances;
        for (name, v) in [("psd", t.psd), ("norm", t.norm), ("faithful", t.faithful), ("free", t.free), ("pos", t.pos)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("tolerance `{name}` = {v} must be positive")));
            }
        }
        Ok(())
    }

    /// GNS spaces of all factors, in order.
    pub fn build_factors(&self) -> Result<Vec<GnsSpace>> {
        let tol = &self.tolerances;
        self.factors
            .iter()
            .map(|f| {
                let alg = BlockAlgebra::new(f.label.clone(), f.blocks.clone())?;
                let state = match (&f.weights, &f.density) {
                    (Some(_), Some(_)) => {
                        return Err(Error::Config(format!(
                            "factor `{}` gives both weights and density",
                            f.label
                        )))
                    }
                    (Some(w), None) => StateSpec::diagonal(&alg, w, tol)?,
                    (None, Some(d)) => {
                        if d.len() != f.blocks.len() {
                            return Err(Error::Config(format!(
                                "factor `{}`: {} density blocks for {} algebra blocks",
                                f.label,
                                d.len(),
                                f.blocks.len()
                            )));
                        }
                        let blocks = d
                            .iter()
                            .zip(&f.blocks)
                            .map(|(m, &dim)| matrix(m, dim, &format!("density of `{}`", f.label)))
                            .collect::<Result<Vec<_>>>()?;
                        StateSpec::new(&alg, blocks, tol)?
                    }
                    (None, None) => StateSpec::normalized_trace(&alg, tol)?,
                };
                GnsSpace::construct(&state, tol)
            })
            .collect()
    }

    pub fn build_space(&self, depth: usize) -> Result<FreeFockSpace> {
        FreeFockSpace::build(self.build_factors()?, depth)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ElementConfig {
    pub factor: String,
    pub blocks: Vec<Matrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub coef: Complex,
    pub word: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PolyConfig {
    pub name: String,
    pub terms: Vec<TermConfig>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PolySet {
    pub schema: u32,
    #[serde(default)]
    pub elements: BTreeMap<String, ElementConfig>,
    pub polynomials: Vec<PolyConfig>,
}

pub fn parse_polys(text: &str) -> Result<PolySet> {
    let set: PolySet = serde_json::from_str(text).map_err(|e| Error::Config(format!("polynomials: {e}")))?;
    check_schema(set.schema)?;
    Ok(set)
}

impl PolySet {
    /// Resolves factor labels and element names against `space`.
    pub fn resolve(&self, space: &FreeFockSpace) -> Result<Vec<(String, NCPoly)>> {
        let factor = |label: &str| {
            space
                .factor_index(label)
                .ok_or_else(|| Error::Config(format!("unknown factor `{label}`")))
        };
        let mut named: BTreeMap<&str, (usize, AlgebraElement)> = BTreeMap::new();
        for (name, e) in &self.elements {
            let f = factor(&e.factor)?;
            let alg = space.factor(f)?.algebra();
            if e.blocks.len() != alg.block_dims().len() {
                return Err(Error::Config(format!("element `{name}`: wrong number of blocks")));
            }
            let blocks = e
                .blocks
                .iter()
                .zip(alg.block_dims())
                .map(|(m, &d)| matrix(m, d, &format!("element `{name}`")))
                .collect::<Result<Vec<_>>>()?;
            named.insert(name, (f, alg.element(blocks)?));
        }
        self.polynomials
            .iter()
            .map(|p| {
                let terms = p
                    .terms
                    .iter()
                    .map(|t| {
                        let letters = t
                            .word
                            .iter()
                            .map(|(label, el)| {
                                let f = factor(label)?;
                                let alg = space.factor(f)?.algebra();
                                let element = element_ref(alg, el, f, &named)?;
                                Ok(Letter::new(f, element))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Ok(Term {
                            coef: complex(&t.coef),
                            letters,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((p.name.clone(), NCPoly::from_terms(terms)))
            })
            .collect()
    }
}

fn element_ref(
    alg: &std::sync::Arc<BlockAlgebra>,
    r: &str,
    factor: usize,
    named: &BTreeMap<&str, (usize, AlgebraElement)>,
) -> Result<AlgebraElement> {
    if r == "1" {
        return Ok(alg.one());
    }
    if let Some(rest) = r.strip_prefix("e:") {
        let idx: Vec<usize> = rest
            .split(':')
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Config(format!("bad matrix unit `{r}`")))?;
        if idx.len() != 3 {
            return Err(Error::Config(format!("matrix unit `{r}` needs e:block:row:col")));
        }
        return alg
            .matrix_unit(idx[0], idx[1], idx[2])
            .map_err(|e| Error::Config(e.to_string()));
    }
    match named.get(r) {
        Some((f, e)) if *f == factor => Ok(e.clone()),
        Some(_) => Err(Error::Config(format!("element `{r}` belongs to another factor"))),
        None => Err(Error::Config(format!("unknown element `{r}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freerep::moment;

    #[test]
    fn default_config_round_trips() {
        let cfg = RunConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(parse_config(&text).unwrap(), cfg);
        let fs = cfg.build_factors().unwrap();
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0].dim(), 2);
    }

    #[test]
    fn density_and_trace_factors() {
        let text = r#"{"schema":1,"factors":[
            {"label":"m","blocks":[2],"density":[[[[0.7,0],[0,0.1]],[[0,-0.1],[0.3,0]]]]},
            {"label":"t","blocks":[1,2]}],"depth":3,"seed":4}"#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.depth, Some(3));
        let fs = cfg.build_factors().unwrap();
        assert_eq!(fs[0].dim(), 4);
        assert_eq!(fs[1].dim(), 5);
    }

    #[test]
    fn config_errors() {
        for bad in [
            r#"{"schema":2,"factors":[{"label":"a","blocks":[1]}]}"#,
            r#"{"schema":1,"factors":[]}"#,
            r#"{"schema":1,"factors":[{"label":"a","blocks":[1]}],"depth":0}"#,
            r#"{"schema":1,"factors":[{"label":"a","blocks":[1]}],"tolerances":{"psd":-1}}"#,
            r#"{"schema":1,"factors":[{"label":"a","blocks":[1]}],"extra":1}"#,
            r#"not json"#,
        ] {
            assert!(matches!(parse_config(bad), Err(Error::Config(_))), "{bad}");
        }
        let cfg = parse_config(r#"{"schema":1,"factors":[{"label":"a","blocks":[2],"density":[[[[1,0]]]]}]}"#).unwrap();
        assert!(matches!(cfg.build_factors(), Err(Error::Config(_))));
    }

    #[test]
    fn polynomials_resolve() {
        let space = RunConfig::default().build_space(3).unwrap();
        let text = r#"{"schema":1,
            "elements":{"h":{"factor":"q","blocks":[[[[2,0]]],[[[0,0]]]]}},
            "polynomials":[
              {"name":"pq","terms":[{"coef":[1,0],"word":[["p","e:0:0:0"],["q","e:0:0:0"]]}]},
              {"name":"one","terms":[{"coef":[1,0],"word":[]}]},
              {"name":"h","terms":[{"coef":[0.5,0],"word":[["q","h"]]}]}]}"#;
        let polys = parse_polys(text).unwrap().resolve(&space).unwrap();
        assert_eq!(polys.len(), 3);
        assert!((moment(&space, &polys[0].1).unwrap() - C64::new(0.25, 0.0)).norm() < 1e-12);
        assert!((moment(&space, &polys[1].1).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((moment(&space, &polys[2].1).unwrap() - C64::new(0.5, 0.0)).norm() < 1e-12);
        let bad = r#"{"schema":1,"polynomials":[{"name":"x","terms":[{"coef":[1,0],"word":[["p","h"]]}]}]}"#;
        assert!(parse_polys(bad).unwrap().resolve(&space).is_err());
        let bad = r#"{"schema":1,"polynomials":[{"name":"x","terms":[{"coef":[1,0],"word":[["z","1"]]}]}]}"#;
        assert!(parse_polys(bad).unwrap().resolve(&space).is_err());
    }
}
