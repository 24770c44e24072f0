use serde_json::{json, Value};
use valuata::{CycloField, GroupElt, GroupKind, ResidueField, SeriesField, ValueGroup};

use crate::CliError;

/// Everything needed to rebuild a field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldSpec {
    Series {
        p: u64,
        group: GroupKind,
        residue: String,
        precision: GroupElt,
    },
    Cyclo {
        p: u64,
        m: u32,
        with_y: bool,
        n: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Series,
    Cyclo,
}

/// Raw field flags as given on the command line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FieldFlags {
    pub field: Option<String>,
    pub p: Option<u64>,
    pub group: Option<String>,
    pub residue: Option<String>,
    pub m: Option<u32>,
    pub with_y: bool,
    pub precision: Option<String>,
}

fn default_padic_precision(p: u64) -> u32 {
    (2..=16)
        .rev()
        .find(|&n| p.checked_pow(n).is_some_and(|q| q < 1 << 62))
        .unwrap_or(2)
}

fn residue_order(residue: &str) -> Result<u64, CliError> {
    let q = residue
        .split_once(':')
        .filter(|(kind, _)| *kind == "gf" || *kind == "ratfunc")
        .and_then(|(_, q)| q.parse::<u64>().ok())
        .ok_or_else(|| {
            CliError::Usage(format!(
                "bad residue `{residue}`, expected gf:q or ratfunc:q"
            ))
        })?;
    Ok(q)
}

fn smallest_prime_factor(q: u64) -> u64 {
    (2..=q).find(|d| q.is_multiple_of(*d)).unwrap_or(q)
}

impl FieldSpec {
    pub fn from_flags(flags: &FieldFlags, default: FieldKind) -> Result<Self, CliError> {
        let kind = match flags.field.as_deref() {
            None => default,
            Some("series") => FieldKind::Series,
            Some("cyclo") => FieldKind::Cyclo,
            Some(other) => {
                return Err(CliError::Usage(format!(
                    "unknown field kind `{other}` (series, cyclo)"
                )))
            }
        };
        match kind {
            FieldKind::Series => {
                let residue = match (&flags.residue, flags.p) {
                    (Some(r), _) => r.clone(),
                    (None, Some(p)) => format!("gf:{p}"),
                    (None, None) => "gf:2".to_string(),
                };
                let char_p = smallest_prime_factor(residue_order(&residue)?);
                let p = flags.p.unwrap_or(char_p);
                if p != char_p {
                    return Err(CliError::Usage(format!(
                        "--p {p} does not match residue field {residue}"
                    )));
                }
                let group: GroupKind = flags.group.as_deref().unwrap_or("int").parse().map_err(
                    |e: valuata::value_group::GroupError| CliError::Usage(e.to_string()),
                )?;
                let precision = match &flags.precision {
                    Some(t) => t.parse().map_err(|e: valuata::value_group::GroupError| {
                        CliError::Usage(e.to_string())
                    })?,
                    None if group == GroupKind::Lex2 => GroupElt::pair_frac((16, 1), (0, 1)),
                    None => GroupElt::int(16),
                };
                Ok(FieldSpec::Series {
                    p,
                    group,
                    residue,
                    precision,
                })
            }
            FieldKind::Cyclo => {
                let p = flags.p.unwrap_or(2);
                let n = match &flags.precision {
                    Some(t) => t
                        .parse()
                        .map_err(|_| CliError::Usage(format!("bad p-adic precision `{t}`")))?,
                    None => default_padic_precision(p),
                };
                Ok(FieldSpec::Cyclo {
                    p,
                    m: flags.m.unwrap_or(1),
                    with_y: flags.with_y,
                    n,
                })
            }
        }
    }

    pub fn series(p: u64, group: GroupKind, residue: &str, precision: GroupElt) -> Self {
        FieldSpec::Series {
            p,
            group,
            residue: residue.to_string(),
            precision,
        }
    }

    pub fn laurent(residue: &str) -> Self {
        let p = smallest_prime_factor(residue_order(residue).expect("well-formed residue"));
        Self::series(p, GroupKind::Int, residue, GroupElt::int(16))
    }

    pub fn cyclo(p: u64, m: u32, with_y: bool) -> Self {
        FieldSpec::Cyclo {
            p,
            m,
            with_y,
            n: default_padic_precision(p),
        }
    }

    pub fn build_series(&self) -> Result<SeriesField, CliError> {
        let FieldSpec::Series {
            p,
            group,
            residue,
            precision,
        } = self
        else {
            return Err(CliError::Usage("this command needs a series field".into()));
        };
        let q = residue_order(residue)?;
        let res = if residue.starts_with("ratfunc") {
            ResidueField::ratfunc(q)
        } else {
            ResidueField::gf(q)
        }
        .map_err(|e| CliError::Usage(e.to_string()))?;
        SeriesField::new(res, ValueGroup::new(*group, *p), precision.clone())
            .map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn build_cyclo(&self) -> Result<CycloField, CliError> {
        let FieldSpec::Cyclo { p, m, with_y, n } = self else {
            return Err(CliError::Usage(
                "this command needs a cyclotomic field".into(),
            ));
        };
        CycloField::new(*p, *m, *with_y, *n).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn to_json(&self) -> Value {
        match self {
            FieldSpec::Series {
                p,
                group,
                residue,
                precision,
            } => json!({
                "kind": "series",
                "p": p,
                "group": group.name(),
                "residue": residue,
                "precision": precision.to_string(),
            }),
            FieldSpec::Cyclo { p, m, with_y, n } => json!({
                "kind": "cyclo",
                "p": p,
                "m": m,
                "with_y": with_y,
                "N": n,
            }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self, CliError> {
        let bad = |what: &str| CliError::Usage(format!("field: missing or bad `{what}`"));
        let p = v["p"].as_u64().ok_or_else(|| bad("p"))?;
        match v["kind"].as_str() {
            Some("series") => {
                let group = v["group"]
                    .as_str()
                    .and_then(|g| g.parse().ok())
                    .ok_or_else(|| bad("group"))?;
                let residue = v["residue"].as_str().ok_or_else(|| bad("residue"))?;
                let precision = v["precision"]
                    .as_str()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| bad("precision"))?;
                Ok(Self::series(p, group, residue, precision))
            }
            Some("cyclo") => Ok(FieldSpec::Cyclo {
                p,
                m: v["m"].as_u64().ok_or_else(|| bad("m"))? as u32,
                with_y: v["with_y"].as_bool().ok_or_else(|| bad("with_y"))?,
                n: v["N"].as_u64().ok_or_else(|| bad("N"))? as u32,
            }),
            _ => Err(bad("kind")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_resolve_defaults() {
        let s = FieldSpec::from_flags(&FieldFlags::default(), FieldKind::Series).unwrap();
        assert_eq!(s, FieldSpec::laurent("gf:2"));
        let flags = FieldFlags {
            p: Some(3),
            ..Default::default()
        };
        let FieldSpec::Series { residue, .. } =
            FieldSpec::from_flags(&flags, FieldKind::Series).unwrap()
        else {
            panic!()
        };
        assert_eq!(residue, "gf:3");
        let flags = FieldFlags {
            residue: Some("gf:4".into()),
            p: Some(3),
            ..Default::default()
        };
        assert!(FieldSpec::from_flags(&flags, FieldKind::Series).is_err());
        let flags = FieldFlags {
            group: Some("lex2".into()),
            ..Default::default()
        };
        let spec = FieldSpec::from_flags(&flags, FieldKind::Series).unwrap();
        assert_eq!(spec.build_series().unwrap().group().rank(), 2);
        let c = FieldSpec::from_flags(&FieldFlags::default(), FieldKind::Cyclo).unwrap();
        assert_eq!(
            c,
            FieldSpec::Cyclo {
                p: 2,
                m: 1,
                with_y: false,
                n: 16
            }
        );
        assert_eq!(default_padic_precision(13), 16);
        assert!(17u64.pow(default_padic_precision(17)) < 1 << 62);
    }
}
