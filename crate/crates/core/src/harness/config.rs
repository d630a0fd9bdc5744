//! Experiment configuration: presets, flat `key=value` overrides, validation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::FieldContext;
use crate::frs::CodeParams;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::stitching::ChoiceRule;

macro_rules! keyword_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            pub fn as_str(self) -> &'static str {
                match self {
                    $(Self::$variant => $text),+
                }
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok(Self::$variant),)+
                    _ => Err(Error::Config(format!(
                        concat!("unknown ", stringify!($name), " '{}' (expected one of: {})"),
                        s,
                        [$($text),+].join(", ")
                    ))),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

keyword_enum!(ExperimentKind {
    LineGap => "line-gap",
    AffineGap => "affine-gap",
    PinTest => "pin-test",
    DesignCheck => "design-check",
    DecoderCheck => "decoder-check",
    Trend => "trend",
});

keyword_enum!(
    /// How near codewords are found: exhaustive codebook or algebraic decoder.
    Mode { Oracle => "oracle", Decoder => "decoder" }
);

keyword_enum!(Corruption {
    JointBlock => "joint-block",
    PerAlpha => "per-alpha",
    None => "none",
});

keyword_enum!(LineSource { Planted => "planted", Random => "random" });

fn parse_choice(s: &str) -> Result<ChoiceRule> {
    match s {
        "nearest" => Ok(ChoiceRule::Nearest),
        "farthest" => Ok(ChoiceRule::Farthest),
        _ => Err(Error::Config(format!("unknown choice rule '{s}' (expected nearest or farthest)"))),
    }
}

fn choice_str(c: ChoiceRule) -> &'static str {
    match c {
        ChoiceRule::Nearest => "nearest",
        ChoiceRule::Farthest => "farthest",
    }
}

/// Every recognised key, in echo order. `grid-<key>` keys are also accepted.
pub const KEYS: &[&str] = &[
    "experiment",
    "preset",
    "q",
    "gamma",
    "m",
    "n",
    "k",
    "delta",
    "r",
    "t1",
    "t2",
    "eps",
    "a",
    "trials",
    "seed",
    "mode",
    "corruption",
    "line",
    "choice",
    "ell",
    "alpha-samples",
    "draws",
    "dims",
    "cap",
    "etas",
    "qs",
    "lines",
];

const TINY: &[(&str, &str)] = &[
    ("experiment", "line-gap"),
    ("q", "17"),
    ("gamma", "3"),
    ("m", "2"),
    ("n", "4"),
    ("k", "2"),
    ("delta", "1/4"),
    ("r", "3"),
    ("t1", "2"),
    ("t2", "4"),
    ("eps", "3/4"),
    ("a", "2"),
    ("trials", "100"),
    ("seed", "0"),
    ("mode", "oracle"),
    ("corruption", "joint-block"),
    ("line", "planted"),
    ("choice", "nearest"),
    ("ell", "2"),
    ("alpha-samples", "all"),
    ("draws", "10000"),
    ("dims", "1,2"),
    ("cap", "1000000"),
    ("etas", "1/4,1/8,1/16"),
    ("qs", "257,521,1031,2053"),
    ("lines", "2"),
];

const SMALL: &[(&str, &str)] = &[
    ("experiment", "line-gap"),
    ("q", "8191"),
    ("gamma", "auto"),
    ("m", "8"),
    ("n", "32"),
    ("k", "64"),
    ("delta", "1/4"),
    ("r", "4"),
    ("t1", "2"),
    ("t2", "32"),
    ("eps", "3/4"),
    ("a", "32"),
    ("trials", "4"),
    ("seed", "0"),
    ("mode", "decoder"),
    ("corruption", "joint-block"),
    ("line", "planted"),
    ("choice", "nearest"),
    ("ell", "1"),
    ("alpha-samples", "64"),
    ("draws", "1000"),
    ("dims", "1,2"),
    ("cap", "1000000"),
    ("etas", "1/4,1/8,1/16"),
    ("qs", "257,521,1031,2053"),
    ("lines", "2"),
];

pub fn preset(name: &str) -> Result<BTreeMap<String, String>> {
    let table = match name {
        "tiny" => TINY,
        "small" => SMALL,
        _ => return Err(Error::Config(format!("unknown preset '{name}' (expected tiny or small)"))),
    };
    Ok(table.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect())
}

/// Parses flat `key=value` text. Blank lines and `#` comments are skipped.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config(format!("line {}: expected key=value, got '{line}'", lineno + 1)));
        };
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub preset: String,
    pub q: u64,
    /// `None` selects the least primitive root.
    pub gamma: Option<u64>,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub delta: Rational,
    pub r: usize,
    pub t1: usize,
    pub t2: usize,
    pub eps: Rational,
    pub a: usize,
    pub trials: usize,
    pub seed: u64,
    pub mode: Mode,
    pub corruption: Corruption,
    pub line: LineSource,
    pub choice: ChoiceRule,
    pub ell: usize,
    /// `None` sweeps every parameter.
    pub alpha_samples: Option<usize>,
    pub draws: u64,
    pub dims: Vec<usize>,
    pub cap: u128,
    pub etas: Vec<Rational>,
    pub qs: Vec<u64>,
    pub lines: usize,
    /// Sweep axes in key order.
    pub grid: Vec<(String, Vec<String>)>,
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))
}

fn rat(key: &str, v: &str) -> Result<Rational> {
    parse_rational(v).map_err(|e| Error::Config(format!("{key}: {e}")))
}

fn list<T>(key: &str, v: &str, f: impl Fn(&str, &str) -> Result<T>) -> Result<Vec<T>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|x| f(key, x.trim())).collect()
}

impl ExperimentConfig {
    pub fn preset(name: &str) -> Result<Self> {
        Self::from_pairs(std::iter::once(("preset".to_string(), name.to_string())))
    }

    /// Resolves `pairs` over the named preset (`tiny` unless a `preset` key
    /// is given). Later pairs win.
    pub fn from_pairs<I: IntoIterator<Item = (String, String)>>(pairs: I) -> Result<Self> {
        let pairs: Vec<(String, String)> = pairs.into_iter().collect();
        let name = pairs.iter().rev().find(|(k, _)| k == "preset").map_or("tiny", |(_, v)| v.as_str()).to_string();
        let mut map = preset(&name)?;
        let mut grid: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (k, v) in pairs {
            if let Some(axis) = k.strip_prefix("grid-") {
                if !KEYS.contains(&axis) || axis == "preset" {
                    return Err(Error::Config(format!("unknown grid key '{axis}'")));
                }
                let values = if v.trim().is_empty() { Vec::new() } else { v.split(',').map(|s| s.trim().to_string()).collect() };
                grid.insert(axis.to_string(), values);
            } else if KEYS.contains(&k.as_str()) {
                map.insert(k, v);
            } else {
                return Err(Error::Config(format!("unknown key '{k}'")));
            }
        }
        let get = |k: &str| map.get(k).map(String::as_str).unwrap_or("");
        let r: usize = num("r", get("r"))?;
        let t1: usize = num("t1", get("t1"))?;
        let a = match get("a") {
            "auto" => r * r * t1,
            v => num("a", v)?,
        };
        Ok(Self {
            experiment: get("experiment").parse()?,
            preset: name,
            q: num("q", get("q"))?,
            gamma: match get("gamma") {
                "auto" | "" => None,
                v => Some(num("gamma", v)?),
            },
            m: num("m", get("m"))?,
            n: num("n", get("n"))?,
            k: num("k", get("k"))?,
            delta: rat("delta", get("delta"))?,
            r,
            t1,
            t2: num("t2", get("t2"))?,
            eps: rat("eps", get("eps"))?,
            a,
            trials: num("trials", get("trials"))?,
            seed: num("seed", get("seed"))?,
            mode: get("mode").parse()?,
            corruption: get("corruption").parse()?,
            line: get("line").parse()?,
            choice: parse_choice(get("choice"))?,
            ell: num("ell", get("ell"))?,
            alpha_samples: match get("alpha-samples") {
                "all" => None,
                v => Some(num("alpha-samples", v)?),
            },
            draws: num("draws", get("draws"))?,
            dims: list("dims", get("dims"), num)?,
            cap: num("cap", get("cap"))?,
            etas: list("etas", get("etas"), rat)?,
            qs: list("qs", get("qs"), num)?,
            lines: num("lines", get("lines"))?,
            grid: grid.into_iter().collect(),
        })
    }

    /// The resolved configuration as `key=value` pairs; feeding them back to
    /// [`from_pairs`](Self::from_pairs) reproduces `self`.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let join = |v: Vec<String>| v.join(",");
        let mut out: Vec<(&str, String)> = vec![
            ("experiment", self.experiment.to_string()),
            ("preset", self.preset.clone()),
            ("q", self.q.to_string()),
            ("gamma", self.gamma.map_or("auto".to_string(), |g| g.to_string())),
            ("m", self.m.to_string()),
            ("n", self.n.to_string()),
            ("k", self.k.to_string()),
            ("delta", format_rational(&self.delta)),
            ("r", self.r.to_string()),
            ("t1", self.t1.to_string()),
            ("t2", self.t2.to_string()),
            ("eps", format_rational(&self.eps)),
            ("a", self.a.to_string()),
            ("trials", self.trials.to_string()),
            ("seed", self.seed.to_string()),
            ("mode", self.mode.to_string()),
            ("corruption", self.corruption.to_string()),
            ("line", self.line.to_string()),
            ("choice", choice_str(self.choice).to_string()),
            ("ell", self.ell.to_string()),
            ("alpha-samples", self.alpha_samples.map_or("all".to_string(), |s| s.to_string())),
            ("draws", self.draws.to_string()),
            ("dims", join(self.dims.iter().map(|d| d.to_string()).collect())),
            ("cap", self.cap.to_string()),
            ("etas", join(self.etas.iter().map(format_rational).collect())),
            ("qs", join(self.qs.iter().map(|q| q.to_string()).collect())),
            ("lines", self.lines.to_string()),
        ];
        let grid: Vec<(String, String)> = self.grid.iter().map(|(k, v)| (format!("grid-{k}"), v.join(","))).collect();
        // preset first so that re-resolution starts from the same defaults
        out.sort_by_key(|(k, _)| *k != "preset");
        out.into_iter().map(|(k, v)| (k.to_string(), v)).chain(grid).collect()
    }

    /// Config echo for reports.
    pub fn echo(&self) -> BTreeMap<String, String> {
        self.to_pairs().into_iter().collect()
    }

    pub fn with(&self, key: &str, value: &str) -> Result<Self> {
        let mut pairs = self.to_pairs();
        pairs.push((key.to_string(), value.to_string()));
        Self::from_pairs(pairs)
    }

    pub fn code_params(&self) -> Result<CodeParams> {
        self.code_params_at(self.q)
    }

    /// Same code shape over `F_q` for another prime `q`.
    pub fn code_params_at(&self, q: u64) -> Result<CodeParams> {
        let ctx = match self.gamma {
            Some(g) if q == self.q => FieldContext::new(q, g)?,
            _ => FieldContext::with_primitive_root(q)?,
        };
        CodeParams::with_default_basepoints(ctx, self.m, self.n, self.k)
    }

    /// Up-front checks for `kind`; every failure is a [`Error::Config`].
    pub fn validate(&self, kind: ExperimentKind) -> Result<()> {
        let err = |msg: String| Err(Error::Config(msg));
        let zero = Rational::from_integer(0);
        let one = Rational::from_integer(1);
        match kind {
            ExperimentKind::Trend => {
                if self.qs.is_empty() || self.etas.is_empty() {
                    return err("trend needs nonempty qs and etas".into());
                }
                for &q in &self.qs {
                    self.code_params_at(q).map_err(|e| Error::Config(format!("q = {q}: {e}")))?;
                }
                let rate = Rational::new(self.k as i64, (self.m * self.n) as i64);
                for eta in &self.etas {
                    if *eta <= zero || rate + eta >= one {
                        return err(format!("eta = {} must satisfy 0 < eta < 1 - R", format_rational(eta)));
                    }
                }
                if self.lines == 0 {
                    return err("lines must be positive".into());
                }
            }
            _ => {
                self.code_params().map_err(|e| Error::Config(e.to_string()))?;
            }
        }
        if self.trials == 0 {
            return err("trials must be positive".into());
        }
        if self.delta < zero || self.delta > one {
            return err(format!("delta = {} must lie in [0, 1]", format_rational(&self.delta)));
        }
        if self.alpha_samples == Some(0) {
            return err("alpha-samples must be positive or 'all'".into());
        }
        if (matches!(kind, ExperimentKind::PinTest) || self.needs_stitching(kind))
            && (self.eps <= zero || self.eps >= one) {
                return err(format!("eps = {} must lie in (0, 1)", format_rational(&self.eps)));
            }
        if self.needs_stitching(kind) {
            if self.r < 3 {
                return err(format!("r = {} must be at least 3", self.r));
            }
            if self.eps <= Rational::new(2, self.r as i64) {
                return err(format!("eps = {} must exceed 2/r = 2/{}", format_rational(&self.eps), self.r));
            }
            if self.t1 < 2 || self.t1 > self.t2 {
                return err(format!("need 2 <= t1 <= t2, got t1 = {}, t2 = {}", self.t1, self.t2));
            }
            if self.a < 2 {
                return err(format!("a = {} must be at least 2", self.a));
            }
        }
        match kind {
            ExperimentKind::AffineGap if self.ell == 0 => return err("ell must be at least 1".into()),
            ExperimentKind::PinTest | ExperimentKind::DesignCheck if self.dims.is_empty() => {
                return err("dims must be nonempty".into())
            }
            ExperimentKind::PinTest if self.draws == 0 => return err("draws must be positive".into()),
            _ => {}
        }
        if self.mode == Mode::Oracle && self.needs_stitching(kind) {
            let p = self.code_params().map_err(|e| Error::Config(e.to_string()))?;
            if p.message_count() > self.cap {
                return err(format!("oracle mode needs q^k = {} <= cap = {}", p.message_count(), self.cap));
            }
        }
        Ok(())
    }

    fn needs_stitching(&self, kind: ExperimentKind) -> bool {
        matches!(kind, ExperimentKind::LineGap | ExperimentKind::AffineGap)
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::preset("tiny").expect("built-in preset parses")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn presets_resolve() {
        let tiny = ExperimentConfig::preset("tiny").unwrap();
        assert_eq!((tiny.q, tiny.m, tiny.n, tiny.k, tiny.a), (17, 2, 4, 2, 2));
        tiny.validate(ExperimentKind::LineGap).unwrap();
        let small = ExperimentConfig::preset("small").unwrap();
        assert_eq!((small.q, small.m, small.n, small.k), (8191, 8, 32, 64));
        assert_eq!(small.mode, Mode::Decoder);
        small.validate(ExperimentKind::LineGap).unwrap();
        assert!(ExperimentConfig::preset("huge").is_err());
    }

    #[test]
    fn pairs_round_trip_and_override() {
        let text = "# campaign\npreset = tiny\ndelta=1/8\ntrials=7\n\nchoice=farthest\n";
        let cfg = ExperimentConfig::from_pairs(parse_pairs(text).unwrap()).unwrap();
        assert_eq!((cfg.delta, cfg.trials, cfg.choice), (ratio(1, 8), 7, ChoiceRule::Farthest));
        assert_eq!(ExperimentConfig::from_pairs(cfg.to_pairs()).unwrap(), cfg);
        assert_eq!(cfg.with("trials", "9").unwrap().trials, 9);
        assert!(parse_pairs("novalue").is_err());
        assert!(ExperimentConfig::from_pairs([("bogus".to_string(), "1".to_string())]).is_err());
        assert!(ExperimentConfig::from_pairs([("q".to_string(), "x".to_string())]).is_err());
    }

    #[test]
    fn derived_a_and_grid() {
        let cfg = ExperimentConfig::from_pairs([
            ("a".to_string(), "auto".to_string()),
            ("grid-delta".to_string(), "0,1/4".to_string()),
        ])
        .unwrap();
        assert_eq!(cfg.a, 3 * 3 * 2);
        assert_eq!(cfg.grid, vec![("delta".to_string(), vec!["0".to_string(), "1/4".to_string()])]);
        assert_eq!(ExperimentConfig::from_pairs(cfg.to_pairs()).unwrap(), cfg);
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        let base = ExperimentConfig::default();
        for (k, v) in [("eps", "1/2"), ("r", "2"), ("t1", "5"), ("a", "1"), ("delta", "3/2"), ("trials", "0"), ("k", "9")] {
            let cfg = base.with(k, v).unwrap();
            assert!(matches!(cfg.validate(ExperimentKind::LineGap), Err(Error::Config(_))), "{k}={v}");
        }
        // eps = 1/2 is fine for pinning, which has no stitching constraint
        base.with("eps", "1/2").unwrap().validate(ExperimentKind::PinTest).unwrap();
        let big = base.with("k", "6").unwrap();
        assert!(big.validate(ExperimentKind::LineGap).is_err());
        big.with("mode", "decoder").unwrap().validate(ExperimentKind::LineGap).unwrap();
    }
}
