//! Flat `section.key = value` configuration.
//!
//! Parsing is fail-closed: unknown or repeated keys, malformed lines and
//! out-of-range values are all errors. Every key has a documented default
//! (some derived from the grid), and the fully resolved configuration can
//! be echoed back in the same format so that `parse(echo(cfg)) == cfg`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::evolution::{EvolutionConfig, Mode, Scheme};
use crate::format::num;
use crate::landau::LandauParams;
use crate::spectral::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Experiment {
    LandauVerify,
    Inequalities,
    LinearDecay,
    Picard,
    Decay,
    Split,
    WeakStrong,
    Continuity,
    Resolvent,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Self::LandauVerify,
        Self::Inequalities,
        Self::LinearDecay,
        Self::Picard,
        Self::Decay,
        Self::Split,
        Self::WeakStrong,
        Self::Continuity,
        Self::Resolvent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::LandauVerify => "landau-verify",
            Self::Inequalities => "inequalities",
            Self::LinearDecay => "linear-decay",
            Self::Picard => "picard",
            Self::Decay => "decay",
            Self::Split => "split",
            Self::WeakStrong => "weakstrong",
            Self::Continuity => "continuity",
            Self::Resolvent => "resolvent",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|e| e.name()).collect();
            Error::Config(format!("unknown experiment `{s}`; expected one of {}", names.join(", ")))
        })
    }
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Kind {
    Int { min: u64 },
    Real(Range),
    Reals(Range),
    Pairs,
    Choice(&'static [&'static str]),
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Range {
    Positive,
    NonNegative,
    Any,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Fallback {
    Required,
    Value(&'static str),
    /// Derived from other keys once they are known.
    Derived,
}

struct Key {
    name: &'static str,
    kind: Kind,
    default: Fallback,
}

const fn key(name: &'static str, kind: Kind, default: Fallback) -> Key {
    Key { name, kind, default }
}

use Fallback::{Derived, Required, Value as D};
use Range::{Any, NonNegative, Positive};

const KEYS: &[Key] = &[
    key("run.experiment", Kind::Choice(&[
        "landau-verify", "inequalities", "linear-decay", "picard", "decay", "split", "weakstrong", "continuity", "resolvent",
    ]), Required),
    key("run.seed", Kind::Int { min: 0 }, D("20240917")),
    key("run.out", Kind::Text, D("out")),
    key("grid.n", Kind::Int { min: 8 }, Required),
    key("grid.l", Kind::Real(Positive), Required),
    key("landau.c", Kind::Real(Positive), D("10")),
    key("landau.delta", Kind::Real(Positive), Derived),
    key("landau.r_in", Kind::Real(Positive), Derived),
    key("landau.r_out", Kind::Real(Positive), Derived),
    key("evolution.dt", Kind::Real(Positive), D("0.01")),
    key("evolution.t_end", Kind::Real(Positive), D("1")),
    key("evolution.scheme", Kind::Choice(&["imex_rk2", "imex_euler"]), D("imex_rk2")),
    key("evolution.mode", Kind::Choice(&["full", "linear", "mollified", "split"]), D("full")),
    key("evolution.epsilon", Kind::Real(NonNegative), D("0")),
    key("evolution.snapshot_every", Kind::Int { min: 1 }, D("10")),
    key("evolution.coupling", Kind::Real(NonNegative), D("1")),
    key("data.kind", Kind::Choice(&["random", "swirl"]), D("random")),
    key("data.amplitude", Kind::Real(NonNegative), D("0.5")),
    key("data.band", Kind::Int { min: 1 }, D("3")),
    key("data.core", Kind::Real(Positive), D("1")),
    key("data.r_in", Kind::Real(Positive), Derived),
    key("data.r_out", Kind::Real(Positive), Derived),
    key("verify.points", Kind::Int { min: 1 }, D("20")),
    key("verify.h", Kind::Real(Positive), D("0.001")),
    key("verify.n_quad", Kind::Int { min: 32 }, D("64")),
    key("verify.samples", Kind::Int { min: 100 }, D("10000")),
    key("verify.c_list", Kind::Reals(Positive), D("1.5, 2, 3, 10")),
    key("audit.trials", Kind::Int { min: 1 }, D("50")),
    key("linear.p_list", Kind::Reals(Positive), D("2, 3, 6")),
    key("linear.trials", Kind::Int { min: 1 }, D("3")),
    key("picard.tol", Kind::Real(Positive), D("1e-8")),
    key("picard.max_iter", Kind::Int { min: 1 }, D("10")),
    key("picard.trials", Kind::Int { min: 10 }, D("10")),
    key("picard.gate_fraction", Kind::Real(Positive), D("0.5")),
    key("decay.q_list", Kind::Reals(Positive), D("3, 4, 6")),
    key("decay.t_min", Kind::Real(NonNegative), D("0")),
    key("decay.t_sat", Kind::Real(NonNegative), D("0")),
    key("split.k_cut", Kind::Real(Positive), D("1")),
    key("weakstrong.pairs", Kind::Pairs, D("32:48, 48:64")),
    key("continuity.magnitudes", Kind::Reals(NonNegative), D("0.0001, 0.0002, 0.0005, 0.001")),
    key("resolvent.rho", Kind::Reals(Positive), D("0.1, 1, 10")),
    key("resolvent.theta", Kind::Reals(Any), D("0, 1.0471975511965976, -1.0471975511965976")),
    key("resolvent.q_list", Kind::Reals(Positive), D("2, 3")),
    key("resolvent.sector_delta", Kind::Real(Positive), D("0.5235987755982988")),
    key("resolvent.tol", Kind::Real(Positive), D("1e-10")),
    key("resolvent.max_iter", Kind::Int { min: 1 }, D("400")),
];

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(u64),
    Real(f64),
    Reals(Vec<f64>),
    Pairs(Vec<(usize, usize)>),
    Text(String),
}

impl Value {
    fn echo(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Real(x) => num(*x),
            Value::Reals(v) => v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(", "),
            Value::Pairs(v) => v.iter().map(|(a, b)| format!("{a}:{b}")).collect::<Vec<_>>().join(", "),
            Value::Text(s) => s.clone(),
        }
    }
}

/// A fully resolved run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<&'static str, Value>,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn parse_real(name: &str, s: &str, range: Range) -> Result<f64> {
    let x: f64 = s.trim().parse().map_err(|_| config_err(format!("`{name}`: `{s}` is not a number")))?;
    let ok = x.is_finite()
        && match range {
            Positive => x > 0.0,
            NonNegative => x >= 0.0,
            Any => true,
        };
    if !ok {
        let want = match range {
            Positive => "a positive number",
            NonNegative => "a nonnegative number",
            Any => "a finite number",
        };
        return Err(config_err(format!("`{name}` must be {want}, got {s}")));
    }
    Ok(x)
}

fn parse_value(k: &Key, raw: &str) -> Result<Value> {
    let name = k.name;
    Ok(match k.kind {
        Kind::Int { min } => {
            let i: u64 = raw.parse().map_err(|_| config_err(format!("`{name}`: `{raw}` is not a nonnegative integer")))?;
            if i < min {
                return Err(config_err(format!("`{name}` must be at least {min}, got {i}")));
            }
            Value::Int(i)
        }
        Kind::Real(r) => Value::Real(parse_real(name, raw, r)?),
        Kind::Reals(r) => {
            let v = raw.split(',').map(|s| parse_real(name, s, r)).collect::<Result<Vec<_>>>()?;
            Value::Reals(v)
        }
        Kind::Pairs => Value::Pairs(
            raw.split(',')
                .map(|p| {
                    let (a, b) = p.trim().split_once(':').ok_or_else(|| config_err(format!("`{name}`: expected `coarse:fine`, got `{p}`")))?;
                    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| config_err(format!("`{name}`: `{s}` is not a grid size")));
                    Ok((parse(a)?, parse(b)?))
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        Kind::Choice(options) => {
            if !options.contains(&raw) {
                return Err(config_err(format!("`{name}` must be one of {}, got `{raw}`", options.join(", "))));
            }
            Value::Text(raw.to_string())
        }
        Kind::Text => {
            if raw.is_empty() {
                return Err(config_err(format!("`{name}` must not be empty")));
            }
            Value::Text(raw.to_string())
        }
    })
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parse configuration text. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw: BTreeMap<&'static str, (usize, String)> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("line {lineno}: expected `section.key = value`, got `{line}`")))?;
            let (k, v) = (k.trim(), v.trim());
            let entry = KEYS
                .iter()
                .find(|e| e.name == k)
                .ok_or_else(|| config_err(format!("line {lineno}: unknown key `{k}`")))?;
            if let Some((first, _)) = raw.insert(entry.name, (lineno, v.to_string())) {
                return Err(config_err(format!("line {lineno}: key `{k}` already set on line {first}")));
            }
        }
        let mut values = BTreeMap::new();
        for k in KEYS {
            let v = match (raw.get(k.name), k.default) {
                (Some((lineno, s)), _) => parse_value(k, s).map_err(|e| match e {
                    Error::Config(m) => config_err(format!("line {lineno}: {m}")),
                    other => other,
                })?,
                (None, D(s)) => parse_value(k, s)?,
                (None, Required) => return Err(config_err(format!("missing required key `{}`", k.name))),
                (None, Derived) => continue,
            };
            values.insert(k.name, v);
        }
        let mut cfg = Self { values };
        cfg.derive()?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn derive(&mut self) -> Result<()> {
        let l = self.real("grid.l");
        let n = self.int("grid.n") as f64;
        let defaults = [
            ("landau.delta", 4.0 * l / n),
            ("landau.r_in", 0.25 * l),
            ("landau.r_out", 0.45 * l),
            ("data.r_in", 0.375 * l),
            ("data.r_out", 0.46875 * l),
        ];
        for (k, v) in defaults {
            let name = KEYS.iter().find(|e| e.name == k).unwrap().name;
            self.values.entry(name).or_insert(Value::Real(v));
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.int("grid.n") % 2 != 0 {
            return Err(config_err(format!("`grid.n` must be even, got {}", self.int("grid.n"))));
        }
        if self.real("landau.c") <= 1.0 {
            return Err(config_err(format!("`landau.c` must exceed 1, got {}", self.real("landau.c"))));
        }
        if self.real("landau.r_in") >= self.real("landau.r_out") {
            return Err(config_err("`landau.r_in` must be below `landau.r_out`"));
        }
        if self.real("data.r_in") >= self.real("data.r_out") {
            return Err(config_err("`data.r_in` must be below `data.r_out`"));
        }
        if self.text("evolution.mode") == "mollified" && self.real("evolution.epsilon") == 0.0 {
            return Err(config_err("`evolution.epsilon` must be positive in mollified mode"));
        }
        if let Some(q) = self.reals("decay.q_list").iter().find(|q| !(3.0..=12.0).contains(*q)) {
            return Err(config_err(format!("`decay.q_list` entries must lie in [3, 12], got {q}")));
        }
        if let Some(p) = self.reals("linear.p_list").iter().find(|p| ![2.0, 3.0, 6.0].contains(*p)) {
            return Err(config_err(format!("`linear.p_list` entries must be 2, 3 or 6, got {p}")));
        }
        Ok(())
    }

    /// The resolved configuration in input format, one key per line, with
    /// reals at 17 significant digits.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        for k in KEYS {
            writeln!(out, "{} = {}", k.name, self.values[k.name].echo()).unwrap();
        }
        out
    }

    /// Override a key with a raw value, as if it had been in the file.
    pub fn set(&mut self, name: &str, raw: &str) -> Result<()> {
        let k = KEYS.iter().find(|e| e.name == name).ok_or_else(|| config_err(format!("unknown key `{name}`")))?;
        self.values.insert(k.name, parse_value(k, raw)?);
        self.validate()
    }

    fn get(&self, name: &str) -> &Value {
        self.values.get(name).unwrap_or_else(|| panic!("no config key `{name}`"))
    }

    pub fn int(&self, name: &str) -> u64 {
        match self.get(name) {
            Value::Int(i) => *i,
            v => panic!("`{name}` is not an integer: {v:?}"),
        }
    }

    pub fn usize(&self, name: &str) -> usize {
        self.int(name) as usize
    }

    pub fn real(&self, name: &str) -> f64 {
        match self.get(name) {
            Value::Real(x) => *x,
            v => panic!("`{name}` is not a real: {v:?}"),
        }
    }

    pub fn reals(&self, name: &str) -> &[f64] {
        match self.get(name) {
            Value::Reals(x) => x,
            v => panic!("`{name}` is not a list: {v:?}"),
        }
    }

    pub fn pairs(&self, name: &str) -> &[(usize, usize)] {
        match self.get(name) {
            Value::Pairs(x) => x,
            v => panic!("`{name}` is not a pair list: {v:?}"),
        }
    }

    pub fn text(&self, name: &str) -> &str {
        match self.get(name) {
            Value::Text(x) => x,
            v => panic!("`{name}` is not text: {v:?}"),
        }
    }

    pub fn experiment(&self) -> Experiment {
        self.text("run.experiment").parse().unwrap()
    }

    pub fn seed(&self) -> u64 {
        self.int("run.seed")
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.usize("grid.n"), self.real("grid.l"))
    }

    pub fn landau(&self) -> Result<LandauParams> {
        LandauParams::new(self.real("landau.c"), self.real("landau.delta"), self.real("landau.r_in"), self.real("landau.r_out"))
    }

    pub fn evolution(&self) -> Result<EvolutionConfig> {
        let scheme = match self.text("evolution.scheme") {
            "imex_euler" => Scheme::ImexEuler,
            _ => Scheme::ImexRk2,
        };
        let mode = match self.text("evolution.mode") {
            "linear" => Mode::Linear,
            "mollified" => Mode::Mollified,
            "split" => Mode::Split,
            _ => Mode::Full,
        };
        let mut cfg = EvolutionConfig::new(self.real("evolution.dt"), self.real("evolution.t_end"))
            .with_background(self.landau()?)
            .with_scheme(scheme)
            .with_mode(mode)
            .with_snapshot_every(self.usize("evolution.snapshot_every"));
        cfg.coupling = self.real("evolution.coupling");
        let eps = self.real("evolution.epsilon");
        cfg.mollifier_eps = (eps > 0.0).then_some(eps);
        Ok(cfg)
    }

    /// Key/value pairs for the summary's `params` block.
    pub fn params(&self) -> BTreeMap<String, String> {
        self.values.iter().map(|(k, v)| (k.to_string(), v.echo())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "run.experiment = decay\ngrid.n = 32\ngrid.l = 16\n";

    #[test]
    fn minimal_config_gets_the_documented_defaults() {
        let cfg = RunConfig::parse(MINIMAL).unwrap();
        let expected = "\
run.experiment = decay
run.seed = 20240917
run.out = out
grid.n = 32
grid.l = 1.6000000000000000e1
landau.c = 1.0000000000000000e1
landau.delta = 2.0000000000000000e0
landau.r_in = 4.0000000000000000e0
landau.r_out = 7.2000000000000002e0
evolution.dt = 1.0000000000000000e-2
evolution.t_end = 1.0000000000000000e0
evolution.scheme = imex_rk2
evolution.mode = full
evolution.epsilon = 0.0000000000000000e0
evolution.snapshot_every = 10
evolution.coupling = 1.0000000000000000e0
data.kind = random
data.amplitude = 5.0000000000000000e-1
data.band = 3
data.core = 1.0000000000000000e0
data.r_in = 6.0000000000000000e0
data.r_out = 7.5000000000000000e0
verify.points = 20
verify.h = 1.0000000000000000e-3
verify.n_quad = 64
verify.samples = 10000
verify.c_list = 1.5000000000000000e0, 2.0000000000000000e0, 3.0000000000000000e0, 1.0000000000000000e1
audit.trials = 50
linear.p_list = 2.0000000000000000e0, 3.0000000000000000e0, 6.0000000000000000e0
linear.trials = 3
picard.tol = 1.0000000000000000e-8
picard.max_iter = 10
picard.trials = 10
picard.gate_fraction = 5.0000000000000000e-1
decay.q_list = 3.0000000000000000e0, 4.0000000000000000e0, 6.0000000000000000e0
decay.t_min = 0.0000000000000000e0
decay.t_sat = 0.0000000000000000e0
split.k_cut = 1.0000000000000000e0
weakstrong.pairs = 32:48, 48:64
continuity.magnitudes = 1.0000000000000000e-4, 2.0000000000000001e-4, 5.0000000000000001e-4, 1.0000000000000000e-3
resolvent.rho = 1.0000000000000001e-1, 1.0000000000000000e0, 1.0000000000000000e1
resolvent.theta = 0.0000000000000000e0, 1.0471975511965976e0, -1.0471975511965976e0
resolvent.q_list = 2.0000000000000000e0, 3.0000000000000000e0
resolvent.sector_delta = 5.2359877559829882e-1
resolvent.tol = 1.0000000000000000e-10
resolvent.max_iter = 400
";
        assert_eq!(cfg.echo(), expected);
        assert_eq!(cfg.experiment(), Experiment::Decay);
    }

    #[test]
    fn echo_round_trips() {
        let cfg = RunConfig::parse(&format!("{MINIMAL}landau.c = 3.3\nevolution.dt = 0.1\nweakstrong.pairs = 24:32\n")).unwrap();
        assert_eq!(RunConfig::parse(&cfg.echo()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_input_with_locations() {
        let err = |text: &str| RunConfig::parse(text).unwrap_err().to_string();
        assert!(err(&format!("{MINIMAL}evolution.dtt = 0.1\n")).contains("line 4: unknown key `evolution.dtt`"));
        assert!(err(&format!("{MINIMAL}grid.n = 16\n")).contains("already set on line 2"));
        assert!(err(&format!("{MINIMAL}evolution.dt = -1\n")).contains("`evolution.dt` must be a positive number"));
        assert!(err(&format!("{MINIMAL}garbage\n")).contains("line 4"));
        assert!(err("grid.n = 32\ngrid.l = 16\n").contains("run.experiment"));
        assert!(err("run.experiment = nope\ngrid.n = 32\ngrid.l = 1\n").contains("run.experiment"));
        assert!(err(&format!("{MINIMAL}decay.q_list = 3, 13\n")).contains("decay.q_list"));
        assert!(err("run.experiment = decay\ngrid.n = 33\ngrid.l = 1\n").contains("even"));
    }

    #[test]
    fn registry_names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!("bogus".parse::<Experiment>().is_err());
    }
}
