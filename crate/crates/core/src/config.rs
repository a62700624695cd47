//! Job configuration.
//!
//! The grammar is flat TOML: one `key = value` per line, complex numbers as
//! `[re, im]`, and tolerance overrides under dotted `tol.*` keys.
//!
//! ```toml
//! K = -0.75
//! N = 65
//! r = 0.8                       # square inscribed in |z| = r, or:
//! # rect = [-0.5, 0.5, -0.25, 0.25]
//! domain = "disk"               # or "plane"
//! Q = [[0, 0], [0.1, 0]]        # lowest degree first
//! lambda = [[1, 0], [0, 1]]
//! lambda0 = true
//! theta = 0.0
//! bc = "heuristic"              # umbilic | heuristic | file | oracle
//! bc_file = "u.csv"             # with bc = "file"
//! out = "out"
//! ply = false
//! mode = "direct"               # or "converse" with target and lambda1
//! tol.gauss = 1e-10
//! ```

use std::path::PathBuf;

use num_complex::Complex64;
use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::gauss::check_curvature;
use crate::gauss_maps::SeedTarget;
use crate::grid::Grid;
use crate::quadratic::{QDiff, QDomain};
use crate::tolerances;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DomainSpec {
    /// Square inscribed in the circle of this radius.
    Inscribed(f64),
    /// `[x_min, x_max, y_min, y_max]`.
    Rect([f64; 4]),
}

#[derive(Clone, Debug, PartialEq)]
pub enum BcMode {
    /// Trace of the umbilic seed (exact for `Q = 0`).
    Umbilic,
    Heuristic,
    /// A CSV with header `i,j,x,y,u` on the same grid.
    File(PathBuf),
    /// Profile of the one-dimensional shooting solve; constant `Q` on the
    /// plane only.
    Oracle,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Mode {
    Direct,
    Converse { target: SeedTarget, lambda1: Complex64 },
}

/// Thresholds checked in job reports.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub gauss: f64,
    pub det: f64,
    pub unitarity: f64,
    pub k_spread: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            gauss: tolerances::GAUSS,
            det: tolerances::DET,
            unitarity: tolerances::UNITARITY,
            k_spread: tolerances::CURVATURE_SPREAD,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JobConfig {
    /// Target curvature; in converse mode the value implied by `lambda1`.
    pub k: f64,
    pub q: QDiff,
    pub domain: DomainSpec,
    pub n: usize,
    pub lambdas: Vec<Complex64>,
    pub lambda0: bool,
    pub theta: f64,
    pub bc: BcMode,
    pub out: PathBuf,
    pub ply: bool,
    pub mode: Mode,
    pub tol: Tolerances,
}

impl JobConfig {
    /// Built-in umbilic job: `K = -3/4`, `Q = 0`, exact boundary trace.
    pub fn umbilic(n: usize) -> Self {
        Self {
            k: -0.75,
            q: QDiff::zero(QDomain::UnitDisk),
            domain: DomainSpec::Inscribed(0.8),
            n,
            lambdas: vec![Complex64::new(1.0, 0.0)],
            lambda0: false,
            theta: 0.0,
            bc: BcMode::Umbilic,
            out: PathBuf::from("out"),
            ply: false,
            mode: Mode::Direct,
            tol: Tolerances::default(),
        }
    }

    /// Built-in translation-invariant job: `Q = 1` on a strip with the
    /// shooting profile as boundary data.
    pub fn cylinder(n: usize) -> Self {
        Self {
            q: QDiff::constant(Complex64::new(1.0, 0.0), QDomain::Plane),
            domain: DomainSpec::Rect([-0.5, 0.5, -0.125, 0.125]),
            bc: BcMode::Oracle,
            ..Self::umbilic(n)
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        match self.domain {
            DomainSpec::Inscribed(r) => Grid::inscribed(r, self.n),
            DomainSpec::Rect([x0, x1, y0, y1]) => Grid::rectangle(x0, x1, y0, y1, self.n),
        }
    }

    /// Spectral parameters to build surfaces for; `1` when nothing is asked.
    pub fn surface_lambdas(&self) -> Vec<Complex64> {
        if self.lambdas.is_empty() && !self.lambda0 {
            vec![Complex64::new(1.0, 0.0)]
        } else {
            self.lambdas.clone()
        }
    }

    /// Re-runs the checks of [`parse_config`] on a config built in code.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        self.check_into(&mut errs);
        finish(errs)
    }

    fn check_into(&self, errs: &mut Vec<(String, String)>) {
        if let Err(e) = check_curvature("cli_io", self.k) {
            errs.push(("K".into(), e.to_string()));
        }
        if self.n < 9 || self.n % 2 == 0 {
            errs.push(("N".into(), format!("N must be odd and >= 9 (got {})", self.n)));
        }
        match self.grid() {
            Ok(g) => {
                let reach = match self.domain {
                    DomainSpec::Inscribed(r) => ("r", r),
                    DomainSpec::Rect(_) => ("rect", g.max_radius()),
                };
                // Corners exactly on the circle count as outside.
                if self.q.domain() == QDomain::UnitDisk && reach.1 >= 1.0 - 1e-12 {
                    errs.push((
                        reach.0.into(),
                        format!("rectangle reaches |z| = {} outside the unit disk", reach.1),
                    ));
                }
            }
            Err(e) if self.n >= 9 && self.n % 2 == 1 => {
                let key = match self.domain {
                    DomainSpec::Inscribed(_) => "r",
                    DomainSpec::Rect(_) => "rect",
                };
                errs.push((key.into(), e.to_string()));
            }
            Err(_) => {}
        }
        if self.bc == BcMode::Oracle
            && !(self.q.domain() == QDomain::Plane && self.q.degree().unwrap_or(0) == 0 && !self.q.is_zero())
        {
            errs.push(("bc".into(), "oracle boundary data needs a nonzero constant Q on the plane".into()));
        }
        if let Mode::Converse { lambda1, .. } = self.mode {
            let r = lambda1.norm();
            if !(r > 1.0 && r.is_finite()) || (r - 1.0).abs() <= 1e-12 {
                errs.push(("lambda1".into(), format!("|lambda1| = {r} must exceed 1")));
            }
        }
        for (key, v) in [
            ("tol.gauss", self.tol.gauss),
            ("tol.det", self.tol.det),
            ("tol.unitarity", self.tol.unitarity),
            ("tol.k_spread", self.tol.k_spread),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                errs.push((key.into(), format!("tolerance must be positive (got {v})")));
            }
        }
    }
}

fn finish(mut errs: Vec<(String, String)>) -> Result<()> {
    match errs.len() {
        0 => Ok(()),
        1 => {
            let (key, message) = errs.remove(0);
            Err(Error::Validation { key, message })
        }
        _ => Err(Error::Invalid { items: errs }),
    }
}

const KEYS: &[&str] = &[
    "K", "N", "r", "rect", "domain", "Q", "lambda", "lambda0", "theta", "bc", "bc_file", "out", "ply",
    "mode", "target", "lambda1", "tol",
];
const TOL_KEYS: &[&str] = &["gauss", "det", "unitarity", "k_spread"];

struct Reader<'a> {
    table: &'a Table,
    errs: Vec<(String, String)>,
}

impl Reader<'_> {
    fn err(&mut self, key: &str, msg: impl Into<String>) {
        self.errs.push((key.to_string(), msg.into()));
    }

    fn number(&mut self, key: &str, v: &Value) -> Option<f64> {
        match v {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            _ => {
                self.err(key, format!("expected a number, found {}", v.type_str()));
                None
            }
        }
    }

    fn float(&mut self, key: &str) -> Option<f64> {
        let v = self.table.get(key)?;
        self.number(key, v)
    }

    fn boolean(&mut self, key: &str) -> Option<bool> {
        match self.table.get(key)? {
            Value::Boolean(b) => Some(*b),
            v => {
                self.err(key, format!("expected true or false, found {}", v.type_str()));
                None
            }
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        match self.table.get(key)? {
            Value::String(s) => Some(s.clone()),
            v => {
                self.err(key, format!("expected a string, found {}", v.type_str()));
                None
            }
        }
    }

    fn complex(&mut self, key: &str, v: &Value) -> Option<Complex64> {
        match v.as_array().map(|a| a.as_slice()) {
            Some([re, im]) => {
                let re = self.number(key, re)?;
                let im = self.number(key, im)?;
                Some(Complex64::new(re, im))
            }
            _ => {
                self.err(key, "expected a pair [re, im]");
                None
            }
        }
    }

    fn complex_list(&mut self, key: &str) -> Option<Vec<Complex64>> {
        let v = self.table.get(key)?;
        let Some(items) = v.as_array() else {
            self.err(key, "expected a list of [re, im] pairs");
            return None;
        };
        let mut out = Vec::new();
        for (idx, item) in items.iter().enumerate() {
            out.push(self.complex(&format!("{key}[{idx}]"), item)?);
        }
        Some(out)
    }
}

/// Parses and validates a job description.
pub fn parse_config(text: &str) -> Result<JobConfig> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
    let mut rd = Reader { table: &table, errs: Vec::new() };
    for key in table.keys() {
        if !KEYS.contains(&key.as_str()) {
            rd.err(key, "unknown key");
        }
    }

    let mode = rd.string("mode").unwrap_or_else(|| "direct".into());
    let converse = match mode.as_str() {
        "direct" => false,
        "converse" => true,
        other => {
            rd.err("mode", format!("expected direct or converse, found {other:?}"));
            false
        }
    };

    let domain = match rd.string("domain").as_deref() {
        None | Some("disk") => QDomain::UnitDisk,
        Some("plane") => QDomain::Plane,
        Some(other) => {
            rd.err("domain", format!("expected disk or plane, found {other:?}"));
            QDomain::UnitDisk
        }
    };
    let coeffs = rd.complex_list("Q").unwrap_or_default();
    let q = QDiff::new(coeffs, domain);

    let n = match table.get("N") {
        Some(Value::Integer(n)) if *n >= 0 => *n as usize,
        Some(v) => {
            rd.err("N", format!("expected a non-negative integer, found {v}"));
            0
        }
        None => {
            rd.err("N", "missing");
            0
        }
    };

    let r = rd.float("r");
    let rect = table.get("rect").and_then(|v| match v.as_array() {
        Some(a) if a.len() == 4 => {
            let vals: Vec<f64> = a.iter().filter_map(|x| rd.number("rect", x)).collect();
            (vals.len() == 4).then(|| [vals[0], vals[1], vals[2], vals[3]])
        }
        _ => {
            rd.err("rect", "expected [x_min, x_max, y_min, y_max]");
            None
        }
    });
    let dom = match (r, rect) {
        (Some(_), Some(_)) => {
            rd.err("rect", "give either r or rect, not both");
            DomainSpec::Inscribed(0.8)
        }
        (Some(r), None) => {
            if !(r > 0.0) {
                rd.err("r", format!("radius must be positive (got {r})"));
            }
            DomainSpec::Inscribed(r)
        }
        (None, Some(b)) => DomainSpec::Rect(b),
        (None, None) => {
            if !table.contains_key("rect") {
                rd.err("r", "missing domain bounds: give r or rect");
            }
            DomainSpec::Inscribed(0.8)
        }
    };

    let lambdas = rd.complex_list("lambda").unwrap_or_default();
    for (idx, l) in lambdas.iter().enumerate() {
        if l.norm() == 0.0 {
            rd.err(&format!("lambda[{idx}]"), "spectral parameter must be nonzero");
        }
    }
    let lambda0 = rd.boolean("lambda0").unwrap_or(false);
    let theta = rd.float("theta").unwrap_or(0.0);

    let bc = match rd.string("bc").as_deref() {
        None | Some("heuristic") => BcMode::Heuristic,
        Some("umbilic") => BcMode::Umbilic,
        Some("oracle") => BcMode::Oracle,
        Some("file") => match rd.string("bc_file") {
            Some(p) => BcMode::File(PathBuf::from(p)),
            None => {
                rd.err("bc_file", "required when bc = \"file\"");
                BcMode::Heuristic
            }
        },
        Some(other) => {
            rd.err("bc", format!("expected umbilic, heuristic, file or oracle, found {other:?}"));
            BcMode::Heuristic
        }
    };
    let out = PathBuf::from(rd.string("out").unwrap_or_else(|| "out".into()));
    let ply = rd.boolean("ply").unwrap_or(false);

    let mut tol = Tolerances::default();
    if let Some(v) = table.get("tol") {
        match v.as_table() {
            Some(t) => {
                for (key, val) in t {
                    let full = format!("tol.{key}");
                    if !TOL_KEYS.contains(&key.as_str()) {
                        rd.err(&full, "unknown tolerance");
                        continue;
                    }
                    if let Some(x) = rd.number(&full, val) {
                        match key.as_str() {
                            "gauss" => tol.gauss = x,
                            "det" => tol.det = x,
                            "unitarity" => tol.unitarity = x,
                            _ => tol.k_spread = x,
                        }
                    }
                }
            }
            None => rd.err("tol", "expected dotted keys such as tol.gauss"),
        }
    }

    let k_given = rd.float("K");
    let (k, mode) = if converse {
        let target = match rd.string("target").as_deref() {
            Some("H2") | None => SeedTarget::H2,
            Some("S2") => SeedTarget::S2,
            Some(other) => {
                rd.err("target", format!("expected H2 or S2, found {other:?}"));
                SeedTarget::H2
            }
        };
        let lambda1 = match table.get("lambda1") {
            Some(v) => rd.complex("lambda1", v).unwrap_or(Complex64::new(2.0, 0.0)),
            None => {
                rd.err("lambda1", "required in converse mode");
                Complex64::new(2.0, 0.0)
            }
        };
        let r = lambda1.norm();
        let k = if r > 1.0 && r.is_finite() {
            crate::gauss_maps::converse_curvature(r, target).1
        } else {
            -0.5
        };
        if let Some(kg) = k_given {
            if (kg - k).abs() > 1e-12 * k.abs().max(1.0) {
                rd.err("K", format!("converse mode implies K = {k}, config says {kg}"));
            }
        }
        (k, Mode::Converse { target, lambda1 })
    } else {
        for key in ["target", "lambda1"] {
            if table.contains_key(key) {
                rd.err(key, "only valid with mode = \"converse\"");
            }
        }
        let k = k_given.unwrap_or_else(|| {
            if !table.contains_key("K") {
                rd.err("K", "missing");
            }
            -0.75
        });
        (k, Mode::Direct)
    };

    let cfg = JobConfig { k, q, domain: dom, n, lambdas, lambda0, theta, bc, out, ply, mode, tol };
    let mut errs = rd.errs;
    cfg.check_into(&mut errs);
    errs.dedup();
    finish(errs)?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_of(e: Error) -> String {
        match e {
            Error::Validation { key, .. } => key,
            other => panic!("expected a validation error, got {other}"),
        }
    }

    #[test]
    fn minimal_config_is_valid() {
        let cfg = parse_config("K = -0.75\nQ = [[0, 0]]\nN = 65\nr = 0.8\n").unwrap();
        assert_eq!(cfg.n, 65);
        assert!(cfg.q.is_zero());
        assert_eq!(cfg.domain, DomainSpec::Inscribed(0.8));
        assert_eq!(cfg.surface_lambdas(), vec![Complex64::new(1.0, 0.0)]);
    }

    #[test]
    fn bad_curvature_and_even_n() {
        assert_eq!(key_of(parse_config("K = -1.5\nN = 65\nr = 0.8").unwrap_err()), "K");
        let e = parse_config("K = -0.75\nN = 64\nr = 0.8").unwrap_err();
        assert!(e.to_string().contains("N must be odd"), "{e}");
        assert_eq!(key_of(e), "N");
    }

    #[test]
    fn errors_are_itemized() {
        match parse_config("K = 0\nN = 8\nr = 0.8\nbogus = 1").unwrap_err() {
            Error::Invalid { items } => {
                let keys: Vec<_> = items.iter().map(|(k, _)| k.as_str()).collect();
                assert_eq!(keys, ["bogus", "K", "N"]);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn disk_domain_must_stay_inside() {
        assert_eq!(key_of(parse_config("K = -0.5\nN = 9\nr = 1.0").unwrap_err()), "r");
        parse_config("K = -0.5\nN = 9\nr = 1.0\ndomain = \"plane\"").unwrap();
    }

    #[test]
    fn converse_derives_curvature() {
        let cfg = parse_config("mode = \"converse\"\nlambda1 = [1.7320508075688772, 0]\nN = 9\nr = 0.5").unwrap();
        assert!((cfg.k + 0.75).abs() < 1e-15);
        let e = parse_config("mode = \"converse\"\nlambda1 = [0, 1]\nN = 9\nr = 0.5").unwrap_err();
        assert_eq!(key_of(e), "lambda1");
    }

    #[test]
    fn tolerance_overrides_and_lists() {
        let cfg = parse_config(
            "K = 3\nN = 9\nrect = [-0.5, 0.5, -0.5, 0.5]\ndomain = \"plane\"\nQ = [[0, 0], [0.1, 0]]\n\
             lambda = [[1, 0], [0, 1], [-1, 0]]\nbc = \"heuristic\"\ntol.det = 1e-8\n",
        )
        .unwrap();
        assert_eq!(cfg.lambdas.len(), 3);
        assert_eq!(cfg.tol.det, 1e-8);
        assert_eq!(cfg.q.degree(), Some(1));
        assert_eq!(key_of(parse_config("K = 3\nN = 9\nr = 0.5\ntol.foo = 1").unwrap_err()), "tol.foo");
    }

    #[test]
    fn parse_errors_are_reported() {
        assert!(matches!(parse_config("K = = 3"), Err(Error::Parse(_))));
        assert_eq!(key_of(parse_config("K = -0.5\nN = 9\nr = 0.5\nbc = \"file\"").unwrap_err()), "bc_file");
    }
}
