//! Functors selected by name at runtime: `name:key=value,...`, with `(x)`
//! for tensor products.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::f2::F2Vector;
use crate::quad::QuadSpace;

use super::basic::{Iso, Lambda, PFunctor, PVFunctor, Tensor};
use super::exterior::{k_functor, l_functor};
use super::filtration::{kd_m, kdpf, layer, qdpf};
use super::mix::{sigma_functor, MFunctor, MixAB, MixGeneral};
use super::{FunctorRef, ZeroFunctor};

type Params = BTreeMap<String, String>;
type Factory = fn(&str, &Params) -> Result<FunctorRef>;

struct Entry {
    name: &'static str,
    grammar: &'static str,
    build: Factory,
}

/// Name-keyed table of functor constructors.
pub struct FunctorRegistry {
    entries: Vec<Entry>,
}

fn get<'a>(p: &'a Params, key: &str, name: &str) -> Result<&'a str> {
    p.get(key).map(String::as_str).ok_or_else(|| {
        Error::InvalidParameter(format!("{name} needs the parameter {key}="))
    })
}

fn flag(p: &Params, key: &str, name: &str) -> Result<bool> {
    match get(p, key, name)? {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(Error::InvalidParameter(format!("{name}: {key} must be 0 or 1, got {other}"))),
    }
}

fn int(p: &Params, key: &str, name: &str) -> Result<usize> {
    let s = get(p, key, name)?;
    s.parse()
        .map_err(|_| Error::InvalidParameter(format!("{name}: {key} must be a non-negative integer, got {s}")))
}

fn only(p: &Params, keys: &[&str], name: &str) -> Result<()> {
    match p.keys().find(|k| !keys.contains(&k.as_str())) {
        Some(k) => Err(Error::InvalidParameter(format!("{name} does not take {k}="))),
        None => Ok(()),
    }
}

impl Default for FunctorRegistry {
    fn default() -> Self {
        let mut r = Self { entries: Vec::new() };
        r.register("pf", "pf", |n, p| {
            only(p, &[], n)?;
            Ok(Arc::new(PFunctor::new()))
        });
        r.register("pfv", "pfv:v=<k>", |n, p| {
            only(p, &["v"], n)?;
            Ok(Arc::new(PVFunctor::new(int(p, "v", n)?)))
        });
        r.register("lambda", "lambda:n=<k>", |n, p| {
            only(p, &["n"], n)?;
            Ok(Arc::new(Lambda::new(int(p, "n", n)?)))
        });
        r.register("mix", "mix:a=<0|1>,b=<0|1>", |n, p| {
            only(p, &["a", "b"], n)?;
            Ok(Arc::new(MixAB::new(flag(p, "a", n)?, flag(p, "b", n)?)))
        });
        r.register("mixgen", "mixgen:v=<k>,d=<space>,eta=<bits>", |n, p| {
            only(p, &["v", "d", "eta"], n)?;
            let d_text = get(p, "d", n)?;
            let d = QuadSpace::parse(d_text)?;
            let bits: Vec<u8> = get(p, "eta", n)?
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(Error::InvalidParameter(format!("{n}: eta must be a bit string"))),
                })
                .collect::<Result<_>>()?;
            Ok(Arc::new(MixGeneral::new(int(p, "v", n)?, d, F2Vector::from_bits(&bits), d_text)?))
        });
        r.register("sigma", "sigma:a=<0|1>,b=<0|1>", |n, p| {
            only(p, &["a", "b"], n)?;
            Ok(Arc::new(sigma_functor(flag(p, "a", n)?, flag(p, "b", n)?)))
        });
        r.register("m", "m:a=<0|1>", |n, p| {
            only(p, &["a"], n)?;
            Ok(Arc::new(MFunctor::new(flag(p, "a", n)?)))
        });
        r.register("kd_m", "kd_m:a=<0|1>,d=<k>", |n, p| {
            only(p, &["a", "d"], n)?;
            Ok(kd_m(flag(p, "a", n)?, int(p, "d", n)?))
        });
        r.register("kdpf", "kdpf:d=<k>", |n, p| {
            only(p, &["d"], n)?;
            Ok(kdpf(int(p, "d", n)?))
        });
        r.register("qdpf", "qdpf:d=<k>", |n, p| {
            only(p, &["d"], n)?;
            Ok(qdpf(int(p, "d", n)?))
        });
        r.register("K", "K:a=<0|1>,n=<k>", |n, p| {
            only(p, &["a", "n"], n)?;
            Ok(k_functor(flag(p, "a", n)?, int(p, "n", n)?))
        });
        r.register("L", "L:a=<0|1>,n=<k>", |n, p| {
            only(p, &["a", "n"], n)?;
            Ok(l_functor(flag(p, "a", n)?, int(p, "n", n)?))
        });
        r.register("layer", "layer:a=<0|1>,d=<k>", |n, p| {
            only(p, &["a", "d"], n)?;
            let (alpha, d) = (flag(p, "a", n)?, int(p, "d", n)?);
            Ok(layer(kd_m(alpha, d), kd_m(alpha, d + 1), format!("layer:a={},d={d}", alpha as u8)))
        });
        r.register("zero", "zero", |n, p| {
            only(p, &[], n)?;
            Ok(Arc::new(ZeroFunctor))
        });
        r
    }
}

impl FunctorRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds or replaces a constructor.
    pub fn register(&mut self, name: &'static str, grammar: &'static str, build: Factory) {
        self.entries.retain(|e| e.name != name);
        self.entries.push(Entry { name, grammar, build });
    }

    pub fn names(&self) -> Vec<&'static str> {
        let mut v: Vec<_> = self.entries.iter().map(|e| e.name).collect();
        v.push("iso");
        v
    }

    pub fn grammar(&self) -> String {
        let mut lines: Vec<&str> = self.entries.iter().map(|e| e.grammar).collect();
        lines.push("iso:<space>");
        lines.push("<functor>(x)<functor>");
        lines.join("\n")
    }

    /// Parses a functor description.
    pub fn parse(&self, text: &str) -> Result<FunctorRef> {
        let text = text.trim();
        if let Some((l, r)) = text.split_once("(x)") {
            return Ok(Arc::new(Tensor::new(self.parse(l)?, self.parse(r)?)));
        }
        let (name, rest) = text.split_once(':').unwrap_or((text, ""));
        if name == "iso" {
            let d = QuadSpace::parse(rest)?;
            return Ok(Arc::new(Iso::new(d, rest)));
        }
        let entry = self.entries.iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownFunctor {
            name: name.to_string(),
            grammar: self.grammar(),
        })?;
        let mut params = Params::new();
        for part in rest.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("{name}: expected key=value, got {part}")))?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
        (entry.build)(name, &params)
    }
}

/// Parses with the default registry.
pub fn parse_functor(text: &str) -> Result<FunctorRef> {
    FunctorRegistry::default().parse(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        let w = QuadSpace::parse("H0").unwrap();
        for (text, dim) in [
            ("pf", 4),
            ("lambda:n=2", 1),
            ("iso:x1", 1),
            ("iso:x0", 2),
            ("mix:a=1,b=1", 2),
            ("m:a=1", 1),
            ("K:a=1,n=1", 1),
            ("L:a=1,n=2", 0),
            ("kd_m:a=1,d=1", 0),
            ("lambda:n=1(x)iso:x1", 2),
            ("zero", 0),
        ] {
            let f = parse_functor(text).unwrap();
            assert_eq!(f.dim(&w).unwrap(), dim, "{text}");
        }
    }

    #[test]
    fn unknown_names_list_the_grammar() {
        match parse_functor("frobnicate:a=1") {
            Err(Error::UnknownFunctor { name, grammar }) => {
                assert_eq!(name, "frobnicate");
                assert!(grammar.contains("mix:a=<0|1>,b=<0|1>"));
            }
            other => panic!("unexpected {:?}", other.map(|f| f.name())),
        }
        assert!(parse_functor("mix:a=2,b=1").is_err());
        assert!(parse_functor("m:a=1,z=3").is_err());
    }
}
