//! JSON proof certificates.

use serde_json::{json, Map, Value};
use thiserror::Error;

use super::{Proof, Rule, Sequent, Side};
use crate::formula::Formula;
use crate::parse::{parse_formula, parse_term, parse_type};
use crate::term::Term;
use crate::types::{Context, Signature, Type};

pub const FORMAT: &str = "coexplore-certificate/1";

#[derive(Debug, Error)]
pub enum CertError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed certificate: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub signature: Signature,
    pub proof: Proof,
}

fn strings(fs: &[Formula]) -> Value {
    Value::Array(fs.iter().map(|f| Value::String(f.to_string())).collect())
}

fn sequent_json(s: &Sequent) -> Value {
    json!({
        "gamma_t": strings(&s.gamma_t),
        "gamma_a": strings(&s.gamma_a),
        "gamma_c": strings(&s.gamma_c),
        "goal": s.goal.to_string(),
    })
}

fn proof_json(p: &Proof) -> Value {
    let mut m = Map::new();
    m.insert("rule".into(), json!(p.rule.name()));
    m.insert("conclusion".into(), sequent_json(&p.conclusion));
    match &p.rule {
        Rule::Ax { side, pos } => {
            m.insert("side".into(), json!(side.to_string()));
            m.insert("pos".into(), json!(pos));
        }
        Rule::ConjLT { pos, pick } | Rule::ConjLG { pos, pick } => {
            m.insert("pos".into(), json!(pos));
            m.insert("pick".into(), json!(pick));
        }
        Rule::AllR { eigen } => {
            m.insert("eigen".into(), json!(eigen));
        }
        Rule::ExR { witness } => {
            m.insert("witness".into(), json!(witness.to_string()));
        }
        Rule::AllLT { pos, witness } | Rule::AllLG { pos, witness } => {
            m.insert("pos".into(), json!(pos));
            m.insert("witness".into(), json!(witness.to_string()));
        }
        Rule::Cut { lemma } => {
            m.insert("lemma".into(), json!(lemma.to_string()));
        }
        Rule::ImplLT { pos }
        | Rule::ImplLG { pos }
        | Rule::WeakT { pos }
        | Rule::ExchT { pos }
        | Rule::CtrT { pos }
        | Rule::WeakA { pos }
        | Rule::ExchA { pos }
        | Rule::CtrA { pos } => {
            m.insert("pos".into(), json!(pos));
        }
        Rule::ConjR | Rule::ImplR | Rule::DisjR1 | Rule::DisjR2 | Rule::CoFix => {}
    }
    m.insert(
        "premises".into(),
        Value::Array(p.premises.iter().map(proof_json).collect()),
    );
    Value::Object(m)
}

pub fn to_json(proof: &Proof, sig: &Signature) -> Value {
    let types: Map<String, Value> = sig
        .terms
        .iter()
        .map(|(n, t)| (n.clone(), json!(t.to_string())))
        .collect();
    let preds: Map<String, Value> = sig
        .preds
        .iter()
        .map(|(n, t)| (n.clone(), json!(t.to_string())))
        .collect();
    json!({
        "format": FORMAT,
        "signature": { "types": types, "preds": preds },
        "proof": proof_json(proof),
    })
}

/// Pretty-printed certificate with sorted keys.
pub fn to_string(proof: &Proof, sig: &Signature) -> String {
    let mut s = serde_json::to_string_pretty(&to_json(proof, sig)).expect("JSON values serialize");
    s.push('\n');
    s
}

fn bad(msg: impl Into<String>) -> CertError {
    CertError::Malformed(msg.into())
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value, CertError> {
    v.get(name).ok_or_else(|| bad(format!("missing field `{}`", name)))
}

fn str_field<'a>(v: &'a Value, name: &str) -> Result<&'a str, CertError> {
    field(v, name)?
        .as_str()
        .ok_or_else(|| bad(format!("field `{}` is not a string", name)))
}

fn usize_field(v: &Value, name: &str) -> Result<usize, CertError> {
    field(v, name)?
        .as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| bad(format!("field `{}` is not a natural number", name)))
}

struct Reader<'a> {
    sig: &'a Signature,
}

impl Reader<'_> {
    fn formula(&self, src: &str) -> Result<Formula, CertError> {
        parse_formula(src, self.sig, &Context::new())
            .map(|(f, _)| f)
            .map_err(|e| bad(format!("formula `{}`: {}", src, e)))
    }

    fn formulas(&self, v: &Value, name: &str) -> Result<Vec<Formula>, CertError> {
        field(v, name)?
            .as_array()
            .ok_or_else(|| bad(format!("field `{}` is not an array", name)))?
            .iter()
            .map(|x| {
                x.as_str()
                    .ok_or_else(|| bad(format!("`{}` holds a non-string", name)))
                    .and_then(|s| self.formula(s))
            })
            .collect()
    }

    fn sequent(&self, v: &Value) -> Result<Sequent, CertError> {
        Ok(Sequent {
            gamma_t: self.formulas(v, "gamma_t")?,
            gamma_a: self.formulas(v, "gamma_a")?,
            gamma_c: self.formulas(v, "gamma_c")?,
            goal: self.formula(str_field(v, "goal")?)?,
        })
    }

    /// Witnesses are read in a context typing the sequent's free variables.
    fn term(&self, src: &str, s: &Sequent) -> Result<Term, CertError> {
        let ctx: Context = s
            .free_vars()
            .into_iter()
            .filter(|v| !self.sig.contains(v))
            .map(|v| (v, Type::Iota))
            .collect();
        parse_term(src, self.sig, &ctx)
            .map(|(t, _)| t)
            .map_err(|e| bad(format!("term `{}`: {}", src, e)))
    }

    fn proof(&self, v: &Value) -> Result<Proof, CertError> {
        let conclusion = self.sequent(field(v, "conclusion")?)?;
        let pos = || usize_field(v, "pos");
        let witness = || self.term(str_field(v, "witness")?, &conclusion);
        let pick = || -> Result<u8, CertError> {
            let n = usize_field(v, "pick")?;
            u8::try_from(n).map_err(|_| bad("pick out of range"))
        };
        let rule = match str_field(v, "rule")? {
            "Ax" => Rule::Ax {
                side: match str_field(v, "side")? {
                    "T" => Side::T,
                    "A" => Side::A,
                    "C" => Side::C,
                    s => return Err(bad(format!("unknown side `{}`", s))),
                },
                pos: pos()?,
            },
            "ConjR" => Rule::ConjR,
            "ConjLT" => Rule::ConjLT {
                pos: pos()?,
                pick: pick()?,
            },
            "ConjLG" => Rule::ConjLG {
                pos: pos()?,
                pick: pick()?,
            },
            "AllR" => Rule::AllR {
                eigen: str_field(v, "eigen")?.to_string(),
            },
            "ExR" => Rule::ExR { witness: witness()? },
            "AllLT" => Rule::AllLT {
                pos: pos()?,
                witness: witness()?,
            },
            "AllLG" => Rule::AllLG {
                pos: pos()?,
                witness: witness()?,
            },
            "ImplR" => Rule::ImplR,
            "ImplLT" => Rule::ImplLT { pos: pos()? },
            "ImplLG" => Rule::ImplLG { pos: pos()? },
            "DisjR1" => Rule::DisjR1,
            "DisjR2" => Rule::DisjR2,
            "CoFix" => Rule::CoFix,
            "Cut" => Rule::Cut {
                lemma: self.formula(str_field(v, "lemma")?)?,
            },
            "WeakT" => Rule::WeakT { pos: pos()? },
            "ExchT" => Rule::ExchT { pos: pos()? },
            "CtrT" => Rule::CtrT { pos: pos()? },
            "WeakA" => Rule::WeakA { pos: pos()? },
            "ExchA" => Rule::ExchA { pos: pos()? },
            "CtrA" => Rule::CtrA { pos: pos()? },
            r => return Err(bad(format!("unknown rule `{}`", r))),
        };
        let premises = field(v, "premises")?
            .as_array()
            .ok_or_else(|| bad("field `premises` is not an array"))?
            .iter()
            .map(|p| self.proof(p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Proof {
            rule,
            conclusion,
            premises,
        })
    }
}

fn read_signature(v: &Value) -> Result<Signature, CertError> {
    let mut sig = Signature::new();
    for (part, is_pred) in [("types", false), ("preds", true)] {
        let m = field(v, part)?
            .as_object()
            .ok_or_else(|| bad(format!("signature `{}` is not an object", part)))?;
        for (name, ty) in m {
            let src = ty
                .as_str()
                .ok_or_else(|| bad(format!("type of `{}` is not a string", name)))?;
            let ty = parse_type(src).map_err(|e| bad(format!("type of `{}`: {}", name, e)))?;
            sig = if is_pred {
                sig.with_pred(name, ty)
            } else {
                sig.with_term(name, ty)
            };
        }
    }
    Ok(sig)
}

pub fn from_value(v: &Value) -> Result<Certificate, CertError> {
    match v.get("format").and_then(|f| f.as_str()) {
        Some(FORMAT) => {}
        Some(other) => return Err(bad(format!("unsupported format `{}`", other))),
        None => return Err(bad("missing field `format`")),
    }
    let signature = read_signature(field(v, "signature")?)?;
    let proof = Reader { sig: &signature }.proof(field(v, "proof")?)?;
    Ok(Certificate { signature, proof })
}

pub fn from_str(src: &str) -> Result<Certificate, CertError> {
    from_value(&serde_json::from_str(src)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clj::{check, colp_search, colp_to_clj};
    use crate::conv::DEFAULT_CONV_FUEL;
    use crate::parse::{parse_atom, parse_program};

    #[test]
    fn round_trip_stream_certificate() {
        let p = parse_program("stream(cons(0, X)) :- stream(X).").unwrap();
        let (a, _) = parse_atom("stream(t)", &p.signature).unwrap();
        let r = colp_search(&p, &a, 32).unwrap();
        let proof = colp_to_clj(&p, &r).unwrap();
        let text = to_string(&proof, &p.signature);
        let back = from_str(&text).unwrap();
        assert_eq!(back.signature, p.signature);
        check(&back.proof, &back.signature, DEFAULT_CONV_FUEL).unwrap();
        assert_eq!(to_string(&back.proof, &back.signature), text);
    }

    #[test]
    fn rejects_wrong_format() {
        let e = from_str(r#"{"format": "other", "signature": {}, "proof": {}}"#).unwrap_err();
        assert!(matches!(e, CertError::Malformed(_)));
        assert!(matches!(from_str("{\"format\": "), Err(CertError::Json(_))));
    }
}
