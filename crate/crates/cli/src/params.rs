use std::collections::BTreeMap;

use serde_json::Value;

use crate::error::{usage, CliError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Int,
    Float,
    Bool,
    Text,
    Ints,
    Floats,
}

impl Kind {
    pub fn metavar(self) -> &'static str {
        match self {
            Kind::Int => "INT",
            Kind::Float => "REAL",
            Kind::Bool => "BOOL",
            Kind::Text => "TEXT",
            Kind::Ints => "INT,..",
            Kind::Floats => "REAL,..",
        }
    }
}

pub struct Param {
    pub name: &'static str,
    pub kind: Kind,
    /// Textual default in command-line syntax; `None` leaves the key unset.
    pub default: Option<&'static str>,
    pub help: &'static str,
}

pub struct Command {
    pub name: &'static str,
    pub about: &'static str,
    pub trials: usize,
    pub params: &'static [Param],
    pub streams: &'static str,
}

const fn p(name: &'static str, kind: Kind, default: Option<&'static str>, help: &'static str) -> Param {
    Param {
        name,
        kind,
        default,
        help,
    }
}

use Kind::*;

const TRIAL_STREAMS: &str = "trial i draws from substream i of stream (seed, 0)";
const SETUP_AND_TRIALS: &str =
    "problem data draws from stream (seed, 1); trial i draws from substream i of stream (seed, 0)";
const SETUP_AND_SEQUENTIAL: &str =
    "problem data draws from stream (seed, 1); the experiment consumes stream (seed, 0) sequentially";

pub const COMMANDS: &[Command] = &[
    Command {
        name: "caratheodory",
        about: "Empirical-mean approximation of a convex combination",
        trials: 1000,
        params: &[
            p("points", Text, None, "CSV of points, one per line (default: standard basis)"),
            p("dim", Int, Some("10"), "dimension of the default standard basis"),
            p("weights", Floats, None, "target weights (default: uniform)"),
            p("n_points", Int, Some("100"), "points averaged per repetition"),
        ],
        streams: TRIAL_STREAMS,
    },
    Command {
        name: "montecarlo",
        about: "Monte Carlo integration on [0, 1]",
        trials: 500,
        params: &[
            p("integrand", Text, Some("identity"), "identity | indicator | square"),
            p("n", Int, Some("10000"), "samples per estimate"),
        ],
        streams: TRIAL_STREAMS,
    },
    Command {
        name: "chi2-tails",
        about: "Two-sided chi-square tail frequencies against the exponential bound",
        trials: 100_000,
        params: &[
            p("m", Int, Some("50"), "degrees of freedom"),
            p("eps", Float, Some("0.5"), "relative deviation"),
        ],
        streams: "the experiment consumes stream (seed, 0) sequentially",
    },
    Command {
        name: "jl",
        about: "Gaussian Johnson-Lindenstrauss embedding",
        trials: 1,
        params: &[
            p("points", Text, None, "CSV of points (default: random Gaussian points)"),
            p("n_points", Int, Some("20"), "number of random points"),
            p("dim", Int, Some("500"), "dimension of random points"),
            p("eps", Float, Some("0.5"), "distortion"),
            p("m", Int, None, "embedding dimension (default: smallest admissible)"),
        ],
        streams: SETUP_AND_TRIALS,
    },
    Command {
        name: "nets",
        about: "Greedy epsilon-nets on the sphere, ball, Stiefel manifold or low-rank set",
        trials: 1,
        params: &[
            p("kind", Text, Some("sphere"), "sphere | ball | stiefel | lowrank"),
            p("n", Int, Some("3"), "ambient dimension (rows for lowrank)"),
            p("k", Int, Some("1"), "Stiefel frame size"),
            p("big_n", Int, Some("3"), "columns for lowrank"),
            p("r", Int, Some("1"), "rank for lowrank"),
            p("eps", Float, Some("0.5"), "net radius (rho for lowrank)"),
            p("cap", Int, Some("1000000"), "cardinality guard"),
        ],
        streams: "the construction consumes stream (seed, 0) sequentially",
    },
    Command {
        name: "rip-sparse",
        about: "Exact sparse restricted isometry constants of Gaussian matrices",
        trials: 100,
        params: &[
            p("matrix", Text, None, "CSV matrix (default: fresh N(0, 1/m) matrix per trial)"),
            p("m", Int, Some("200"), "rows"),
            p("n", Int, Some("12"), "columns"),
            p("k", Int, Some("2"), "sparsity"),
            p("threshold", Float, Some("0.3333333333333333"), "reported fraction counts delta below this"),
        ],
        streams: TRIAL_STREAMS,
    },
    Command {
        name: "rip-matrix",
        about: "Probe-based lower estimate of the rank-r isometry constant of a Gaussian map",
        trials: 10,
        params: &[
            p("n", Int, Some("4"), "rows"),
            p("big_n", Int, Some("4"), "columns"),
            p("r", Int, Some("1"), "rank"),
            p("m", Int, Some("100"), "measurements"),
            p("probes", Int, Some("200"), "random rank-r probes"),
            p("eps", Float, Some("0.01"), "failure probability for the sample-count formula"),
            p("delta", Float, Some("0.6"), "isometry constant for the sample-count formula"),
        ],
        streams: TRIAL_STREAMS,
    },
    Command {
        name: "nsp",
        about: "Search for a violation of the null space property",
        trials: 1,
        params: &[
            p("matrix", Text, None, "CSV matrix (default: Gaussian m x n)"),
            p("m", Int, Some("6"), "rows of the default matrix"),
            p("n", Int, Some("12"), "columns of the default matrix"),
            p("k", Int, Some("1"), "sparsity"),
            p("budget", Int, Some("1000"), "search budget"),
        ],
        streams: SETUP_AND_SEQUENTIAL,
    },
    Command {
        name: "rank-nsp",
        about: "Search for a violation of the rank null space property",
        trials: 1,
        params: &[
            p("measurement", Text, Some("gaussian"), "gaussian | sampling"),
            p("n", Int, Some("4"), "matrix side"),
            p("m", Int, Some("8"), "measurements"),
            p("r", Int, Some("1"), "rank"),
            p("replacement", Bool, Some("true"), "sample entries with replacement"),
            p("budget", Int, Some("1000"), "search budget"),
        ],
        streams: SETUP_AND_SEQUENTIAL,
    },
    Command {
        name: "complete",
        about: "Nuclear-norm matrix completion by Douglas-Rachford splitting",
        trials: 1,
        params: &[
            p("matrix", Text, None, "CSV matrix to recover (default: normalized all-ones n x n)"),
            p("n", Int, Some("20"), "side of the default matrix"),
            p("basis", Text, Some("entry"), "operator basis for sampling (entry)"),
            p("measurement", Text, Some("sampling"), "sampling | gaussian"),
            p("m", Int, None, "measurements (default: ceil(2 n ln^2 n))"),
            p("replacement", Bool, Some("true"), "sample entries with replacement"),
            p("step", Float, Some("1"), "splitting step"),
            p("tol_residual", Float, Some("1e-9"), "residual tolerance relative to |y|"),
            p("tol_change", Float, Some("1e-10"), "iterate change tolerance"),
            p("max_iter", Int, Some("5000"), "iteration limit"),
        ],
        streams: "the measurement draws from stream (seed, 1)",
    },
    Command {
        name: "golf",
        about: "Golfing-scheme dual certificate for entry sampling",
        trials: 1,
        params: &[
            p("matrix", Text, None, "CSV symmetric matrix (default: normalized all-ones n x n)"),
            p("n", Int, Some("20"), "side of the default matrix"),
            p("beta", Float, Some("1"), "failure exponent"),
            p("nu", Float, None, "coherence (default: computed)"),
            p("l", Int, None, "number of batches (default: ceil(log2(2 n^2 sqrt r)))"),
            p("batch", Int, None, "batch size (default: from nu, r, n, l, beta)"),
            p("replacement", Bool, Some("true"), "sample entries with replacement"),
        ],
        streams: "the batches consume stream (seed, 0) sequentially",
    },
    Command {
        name: "tangent-conc",
        about: "Concentration of the sampling operator restricted to the tangent space",
        trials: 1000,
        params: &[
            p("matrix", Text, None, "CSV symmetric matrix (default: normalized all-ones n x n)"),
            p("n", Int, Some("15"), "side of the default matrix"),
            p("p_fail", Float, Some("0.01"), "target failure probability for the default m"),
            p("m", Int, None, "samples (default: from p_fail)"),
            p("thresholds", Floats, Some("0.5"), "deviation thresholds"),
        ],
        streams: "the experiment consumes stream (seed, 0) sequentially",
    },
    Command {
        name: "lie",
        about: "Lie product formula errors for random symmetric pairs",
        trials: 100,
        params: &[
            p("n", Int, Some("6"), "matrix side"),
            p("ns", Ints, Some("16,32,64,128"), "product orders"),
        ],
        streams: TRIAL_STREAMS,
    },
    Command {
        name: "golden-thompson",
        about: "Golden-Thompson inequality on random symmetric pairs",
        trials: 1000,
        params: &[p("n", Int, Some("6"), "matrix side")],
        streams: TRIAL_STREAMS,
    },
    Command {
        name: "lieb-probe",
        about: "Midpoint concavity of A -> tr exp(H + log A)",
        trials: 1000,
        params: &[p("n", Int, Some("5"), "matrix side")],
        streams: TRIAL_STREAMS,
    },
    Command {
        name: "mat-bernstein",
        about: "Matrix Bernstein tails for sums of i.i.d. random symmetric matrices",
        trials: 10_000,
        params: &[
            p("ensemble", Text, Some("dyad"), "dyad | rademacher | gaussian"),
            p("n", Int, Some("8"), "matrix side"),
            p("m", Int, Some("200"), "summands"),
            p("thresholds", Floats, Some("10,15,20,25,30"), "norm thresholds"),
            p("weights", Text, None, "CSV of stacked n x n weight matrices (default: diagonal units)"),
        ],
        streams: "trial i draws from substream i of stream (seed, 0); estimated parameters use substream `trials`",
    },
];

pub fn command(name: &str) -> Option<&'static Command> {
    COMMANDS.iter().find(|c| c.name == name)
}

pub fn parse_value(kind: Kind, text: &str) -> Result<Value, String> {
    let float = |s: &str| -> Result<Value, String> {
        let v: f64 = s.trim().parse().map_err(|_| format!("expected a real number, got {s:?}"))?;
        if !v.is_finite() {
            return Err(format!("expected a finite number, got {s:?}"));
        }
        Ok(Value::from(v))
    };
    let int = |s: &str| -> Result<Value, String> {
        s.trim()
            .parse::<u64>()
            .map(Value::from)
            .map_err(|_| format!("expected a non-negative integer, got {s:?}"))
    };
    match kind {
        Int => int(text),
        Float => float(text),
        Bool => match text.trim() {
            "true" => Ok(Value::Bool(true)),
            "false" => Ok(Value::Bool(false)),
            _ => Err(format!("expected true or false, got {text:?}")),
        },
        Text => Ok(Value::String(text.to_string())),
        Ints => text.split(',').map(int).collect::<Result<Vec<_>, _>>().map(Value::Array),
        Floats => text.split(',').map(float).collect::<Result<Vec<_>, _>>().map(Value::Array),
    }
}

fn value_matches(kind: Kind, v: &Value) -> bool {
    match kind {
        Int => v.as_u64().is_some(),
        Float => v.is_number(),
        Bool => v.is_boolean(),
        Text => v.is_string(),
        Ints => v.as_array().is_some_and(|a| a.iter().all(|x| x.as_u64().is_some())),
        Floats => v.as_array().is_some_and(|a| a.iter().all(Value::is_number)),
    }
}

/// Rejects unknown keys and ill-typed values, then fills in defaults.
pub fn resolve(cmd: &Command, given: &BTreeMap<String, Value>) -> Result<BTreeMap<String, Value>, CliError> {
    if let Some(k) = given.keys().find(|k| !cmd.params.iter().any(|p| p.name == k.as_str())) {
        return Err(usage(format!("unknown parameter {k:?} for {}", cmd.name)));
    }
    let mut out = BTreeMap::new();
    for p in cmd.params {
        match given.get(p.name) {
            Some(v) if value_matches(p.kind, v) => {
                out.insert(p.name.to_string(), v.clone());
            }
            Some(v) => return Err(usage(format!("parameter {:?} expects {}, got {v}", p.name, p.kind.metavar()))),
            None => {
                if let Some(d) = p.default {
                    out.insert(p.name.to_string(), parse_value(p.kind, d).expect("defaults parse"));
                }
            }
        }
    }
    Ok(out)
}

/// Typed view over resolved parameters.
pub struct Params<'a>(pub &'a BTreeMap<String, Value>);

impl Params<'_> {
    fn get(&self, name: &str) -> Option<&Value> {
        self.0.get(name)
    }

    pub fn opt_int(&self, name: &str) -> Option<usize> {
        self.get(name).and_then(Value::as_u64).map(|v| v as usize)
    }

    pub fn int(&self, name: &str) -> usize {
        self.opt_int(name).unwrap_or_else(|| panic!("parameter {name} has a default"))
    }

    pub fn opt_float(&self, name: &str) -> Option<f64> {
        self.get(name).and_then(Value::as_f64)
    }

    pub fn float(&self, name: &str) -> f64 {
        self.opt_float(name).unwrap_or_else(|| panic!("parameter {name} has a default"))
    }

    pub fn bool(&self, name: &str) -> bool {
        self.get(name).and_then(Value::as_bool).unwrap_or_else(|| panic!("parameter {name} has a default"))
    }

    pub fn text(&self, name: &str) -> Option<&str> {
        self.get(name).and_then(Value::as_str)
    }

    pub fn floats(&self, name: &str) -> Option<Vec<f64>> {
        self.get(name).and_then(Value::as_array).map(|a| a.iter().filter_map(Value::as_f64).collect())
    }

    pub fn ints(&self, name: &str) -> Option<Vec<u64>> {
        self.get(name).and_then(Value::as_array).map(|a| a.iter().filter_map(Value::as_u64).collect())
    }
}
