//! Built-in test functions.

use crate::expr::parse_function;
use crate::function::FunctionHandle;

#[derive(Clone, Copy, Debug)]
pub struct Holder {
    pub constant: f64,
    pub exponent: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct CorpusEntry {
    pub id: &'static str,
    pub source: &'static str,
    pub bounded: bool,
    /// A Hölder condition on (-1, 1), when one is known.
    pub holder: Option<Holder>,
}

impl CorpusEntry {
    pub fn handle(&self) -> FunctionHandle {
        parse_function(self.source).expect("corpus expressions parse")
    }
}

const fn lip(k: f64) -> Option<Holder> {
    Some(Holder {
        constant: k,
        exponent: 1.0,
    })
}

const fn bounded(id: &'static str, source: &'static str, holder: Option<Holder>) -> CorpusEntry {
    CorpusEntry {
        id,
        source,
        bounded: true,
        holder,
    }
}

/// `sqrt(2/e)`, the Lipschitz constant of `exp(-x^2)`.
const GAUSS_K: f64 = 0.857_763_884_960_706_8;
/// `sin(1)`.
const SIN_1: f64 = 0.841_470_984_807_896_5;

pub const CORPUS: &[CorpusEntry] = &[
    bounded("x", "x", lip(1.0)),
    bounded("cheb2", "2*x^2 - 1", lip(4.0)),
    bounded("cube", "x^3", lip(3.0)),
    bounded("exp", "exp(x)", lip(std::f64::consts::E)),
    bounded("sin2", "sin(2*x)", lip(2.0)),
    bounded("cos3", "cos(3*x)", lip(3.0)),
    bounded("abs", "abs(x)", lip(1.0)),
    bounded("ramp", "(x + abs(x))/2", lip(1.0)),
    bounded("shifted_abs", "abs(x - 0.3)", lip(1.0)),
    bounded("recip", "1/(2 + x)", lip(1.0)),
    bounded("log2px", "log(2 + x)", lip(1.0)),
    bounded("sinpi", "sin(pi*x)/pi", lip(1.0)),
    bounded("gauss", "exp(-x^2)", lip(GAUSS_K)),
    bounded("xabs", "x*abs(x)", lip(2.0)),
    bounded("square", "x^2", lip(2.0)),
    bounded("sin1", "sin(x)", lip(1.0)),
    bounded("cos1", "cos(x)", lip(SIN_1)),
    bounded(
        "w",
        "w",
        Some(Holder {
            constant: std::f64::consts::SQRT_2,
            exponent: 0.5,
        }),
    ),
    bounded("chi", "chi(-1, 1)", None),
    bounded("half", "chi(0, 1)", None),
    bounded("bumps", "chi(-0.7, -0.2) + chi(0.1, 0.65)", None),
    bounded("xw", "x*w", None),
    CorpusEntry {
        id: "inv_w",
        source: "1/w",
        bounded: false,
        holder: None,
    },
    CorpusEntry {
        id: "log_profile",
        source: "log((1 - x)/(1 + x))/pi",
        bounded: false,
        holder: None,
    },
];

pub fn find(id: &str) -> Option<&'static CorpusEntry> {
    CORPUS.iter().find(|e| e.id == id)
}

pub fn bounded_entries() -> impl Iterator<Item = &'static CorpusEntry> {
    CORPUS.iter().filter(|e| e.bounded)
}

/// Entries with a Lipschitz condition (Hölder exponent 1).
pub fn lipschitz_entries() -> impl Iterator<Item = &'static CorpusEntry> {
    CORPUS
        .iter()
        .filter(|e| e.holder.is_some_and(|h| h.exponent == 1.0))
}
