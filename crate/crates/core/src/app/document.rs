//! Input documents: a Lie pair with run options and choice sets, in JSON or
//! TOML.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hpl::Choices;
use crate::lie_pair::{Bilinear, LiePair};
use crate::scalar::Scalar;

/// `[x_i, x_j] ∋ coeff·x_k`, 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub coeff: Scalar,
}

/// `∇′_{x_x} x_y ∋ coeff·x_z`, 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxEntry {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub coeff: Scalar,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChoiceSet {
    /// `dim_b × dim_h`: row `l` gives the 𝔥-part added to `x_{dim_h + l}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting_matrix: Option<Vec<Vec<Scalar>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux_connection: Option<Vec<AuxEntry>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim_g: usize,
    pub dim_h: usize,
    #[serde(default)]
    pub brackets: Vec<BracketEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting_matrix: Option<Vec<Vec<Scalar>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux_connection: Option<Vec<AuxEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_arity: Option<usize>,
    /// Second choice set for comparisons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare_with: Option<ChoiceSet>,
}

impl PairDocument {
    /// Parse JSON, or TOML when the text does not start with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        let doc: PairDocument = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("JSON: {e}")))?
        } else {
            toml::from_str(text).map_err(|e| Error::Parse(format!("TOML: {e}")))?
        };
        doc.check_schema()?;
        Ok(doc)
    }

    pub fn check_schema(&self) -> Result<()> {
        if self.dim_h > self.dim_g {
            return Err(Error::InvalidInput(format!("dim_h = {} exceeds dim_g = {}", self.dim_h, self.dim_g)));
        }
        let n = self.dim_g;
        for (e, b) in self.brackets.iter().enumerate() {
            if b.i >= n || b.j >= n || b.k >= n {
                return Err(Error::InvalidInput(format!("brackets[{e}]: index out of range for dim_g = {n}")));
            }
        }
        for set in [self.own_choices(), self.compare_with.clone().unwrap_or_default()] {
            set.check(self.dim_g, self.dim_h)?;
        }
        Ok(())
    }

    pub fn pair(&self) -> Result<LiePair> {
        let entries: Vec<_> = self.brackets.iter().map(|b| (b.i, b.j, b.k, b.coeff.clone())).collect();
        LiePair::new(self.dim_g, self.dim_h, &entries)
    }

    /// The pair, rejecting documents that fail validation.
    pub fn valid_pair(&self) -> Result<LiePair> {
        let p = self.pair()?;
        let v = p.validate();
        if !v.is_valid() {
            return Err(Error::InvalidInput(format!("not a Lie pair: {v:?}")));
        }
        Ok(p)
    }

    pub fn own_choices(&self) -> ChoiceSet {
        ChoiceSet { splitting_matrix: self.splitting_matrix.clone(), aux_connection: self.aux_connection.clone() }
    }

    pub fn choices(&self) -> Result<Choices> {
        self.own_choices().to_choices(self.dim_g)
    }

    pub fn alternative_choices(&self) -> Result<Choices> {
        self.compare_with.clone().unwrap_or_default().to_choices(self.dim_g)
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

impl ChoiceSet {
    fn check(&self, dim_g: usize, dim_h: usize) -> Result<()> {
        if let Some(s) = &self.splitting_matrix {
            if s.len() != dim_g - dim_h || s.iter().any(|r| r.len() != dim_h) {
                return Err(Error::InvalidInput(format!(
                    "splitting_matrix must be {}×{dim_h}",
                    dim_g - dim_h
                )));
            }
        }
        if let Some(a) = &self.aux_connection {
            for (e, x) in a.iter().enumerate() {
                if x.x >= dim_g || x.y >= dim_g || x.z >= dim_g {
                    return Err(Error::InvalidInput(format!("aux_connection[{e}]: index out of range")));
                }
            }
        }
        Ok(())
    }

    pub fn to_choices(&self, dim_g: usize) -> Result<Choices> {
        let aux = match &self.aux_connection {
            Some(a) => {
                let entries: Vec<_> = a.iter().map(|e| (e.x, e.y, e.z, e.coeff.clone())).collect();
                Some(Bilinear::from_entries(dim_g, &entries)?)
            }
            None => None,
        };
        Ok(Choices { splitting: self.splitting_matrix.clone(), aux })
    }
}

/// A splitting matrix file: JSON or TOML (`matrix = [...]`) rows of rationals.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<Scalar>>> {
    #[derive(Deserialize)]
    struct Wrapped {
        matrix: Vec<Vec<Scalar>>,
    }
    if text.trim_start().starts_with('[') {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("splitting matrix: {e}")))
    } else {
        let w: Wrapped = toml::from_str(text).map_err(|e| Error::Parse(format!("splitting matrix: {e}")))?;
        Ok(w.matrix)
    }
}

/// An aux connection file: a JSON list of `{x, y, z, coeff}` or TOML
/// `[[aux_connection]]` tables.
pub fn parse_aux(text: &str) -> Result<Vec<AuxEntry>> {
    #[derive(Deserialize)]
    struct Wrapped {
        aux_connection: Vec<AuxEntry>,
    }
    if text.trim_start().starts_with('[') && !text.trim_start().starts_with("[[") {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("aux connection: {e}")))
    } else {
        let w: Wrapped = toml::from_str(text).map_err(|e| Error::Parse(format!("aux connection: {e}")))?;
        Ok(w.aux_connection)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_and_toml_agree() {
        let j = r#"{"dim_g": 2, "dim_h": 1, "brackets": [{"i": 0, "j": 1, "k": 1, "coeff": "1"},
                   {"i": 1, "j": 0, "k": 1, "coeff": "-1/1"}], "splitting_matrix": [["1/2"]]}"#;
        let t = "dim_g = 2\ndim_h = 1\nsplitting_matrix = [[\"1/2\"]]\n\n[[brackets]]\ni = 0\nj = 1\nk = 1\ncoeff = \"1\"\n\n[[brackets]]\ni = 1\nj = 0\nk = 1\ncoeff = \"-1\"\n";
        let a = PairDocument::parse(j).unwrap();
        let b = PairDocument::parse(t).unwrap();
        assert_eq!(a, b);
        assert!(a.valid_pair().is_ok());
        assert_eq!(PairDocument::parse(&a.canonical_json()).unwrap(), a);
    }

    #[test]
    fn schema_errors() {
        let bad = r#"{"dim_g": 1, "dim_h": 2}"#;
        assert!(matches!(PairDocument::parse(bad), Err(Error::InvalidInput(_))));
        let err = PairDocument::parse("{\"dim_g\": 2,\n \"dim_h\": \"x\"}").unwrap_err();
        assert!(matches!(&err, Error::Parse(m) if m.contains("line 2")), "{err}");
        let oob = r#"{"dim_g": 2, "dim_h": 1, "brackets": [{"i": 0, "j": 5, "k": 1, "coeff": "1"}]}"#;
        assert!(PairDocument::parse(oob).is_err());
    }

    #[test]
    fn choice_files() {
        assert_eq!(parse_matrix("[[\"1/2\", 3]]").unwrap(), vec![vec![Scalar::ratio(1, 2), Scalar::from_int(3)]]);
        assert_eq!(parse_matrix("matrix = [[\"1\"]]").unwrap(), vec![vec![Scalar::one()]]);
        let a = parse_aux(r#"[{"x": 0, "y": 1, "z": 1, "coeff": "2"}]"#).unwrap();
        let b = parse_aux("[[aux_connection]]\nx = 0\ny = 1\nz = 1\ncoeff = \"2\"\n").unwrap();
        assert_eq!(a, b);
        assert!(parse_aux("[{").is_err());
    }
}
