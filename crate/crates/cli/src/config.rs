//! Line-oriented `key = value` run configuration.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use selmut_core::{
    stability_bound_for, Error, GaussianBump, Grid1D, Landscape, Result, SamplingPlan,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Ide,
    Pde,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Ide => "ide",
            Model::Pde => "pde",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Constant(f64),
    Bumps(Vec<GaussianBump>),
}

/// Which post-run checks are evaluated. Thresholds are fixed in the
/// pipeline; the config only switches them on.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Checks {
    pub rate_law: bool,
    pub weights: bool,
    pub equal_split: bool,
    pub total_mass: bool,
    pub selection: bool,
    /// 1-based region whose mass must die out.
    pub extinct_region: Option<usize>,
    pub off_peak: bool,
}

impl Checks {
    pub fn any(&self) -> bool {
        self.rate_law
            || self.weights
            || self.equal_split
            || self.total_mass
            || self.selection
            || self.extinct_region.is_some()
            || self.off_peak
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub name: String,
    pub model: Model,
    pub beta: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub bumps: Vec<GaussianBump>,
    pub offset: f64,
    pub initial: InitialCondition,
    pub dt: f64,
    pub t_final: f64,
    pub splits: Vec<f64>,
    pub snapshots: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub output_dir: Option<PathBuf>,
    pub check_radius: f64,
    /// Minimum mass fraction near the surviving peak for the selection check.
    pub selection_fraction: f64,
    pub checks: Checks,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            name: "run".into(),
            model: Model::Ide,
            beta: 0.0,
            x_min: -1.0,
            x_max: 2.0,
            n_points: 1000,
            bumps: Vec::new(),
            offset: 0.0,
            initial: InitialCondition::Constant(2.0 / 3.0),
            dt: 0.01,
            t_final: 0.0,
            splits: Vec::new(),
            snapshots: Vec::new(),
            epsilons: Vec::new(),
            output_dir: None,
            check_radius: 0.1,
            selection_fraction: 0.9,
            checks: Checks::default(),
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

/// Plain float or a fraction such as `2/3`.
fn number(line: usize, text: &str) -> Result<f64> {
    let text = text.trim();
    let value = match text.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num
                .trim()
                .parse()
                .map_err(|_| err(line, format!("bad number `{text}`")))?;
            let den: f64 = den
                .trim()
                .parse()
                .map_err(|_| err(line, format!("bad number `{text}`")))?;
            num / den
        }
        None => text
            .parse()
            .map_err(|_| err(line, format!("bad number `{text}`")))?,
    };
    if !value.is_finite() {
        return Err(err(line, format!("`{text}` is not finite")));
    }
    Ok(value)
}

fn numbers(line: usize, text: &str) -> Result<Vec<f64>> {
    text.split(',').map(|t| number(line, t)).collect()
}

fn flag(line: usize, text: &str) -> Result<bool> {
    match text.trim() {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        other => Err(err(line, format!("expected true or false, got `{other}`"))),
    }
}

fn bump(line: usize, text: &str) -> Result<GaussianBump> {
    let v = numbers(line, text)?;
    if v.len() != 3 {
        return Err(err(line, "a bump needs `amplitude, center, width`"));
    }
    GaussianBump::new(v[0], v[1], v[2]).map_err(|e| err(line, e.to_string()))
}

const REPEATABLE: [&str; 2] = ["bump", "initial_bump"];

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = HashSet::new();
        let mut initial_level = None;
        let mut initial_bumps = Vec::new();
        let mut saw_t_final = false;
        let mut saw_beta = false;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !REPEATABLE.contains(&key) && !seen.insert(key.to_string()) {
                return Err(err(line, format!("duplicate key `{key}`")));
            }
            match key {
                "name" => {
                    if value.is_empty() || value.contains(['/', '\\']) {
                        return Err(err(
                            line,
                            "name must be non-empty and free of path separators",
                        ));
                    }
                    cfg.name = value.to_string();
                }
                "model" => {
                    cfg.model = match value {
                        "ide" => Model::Ide,
                        "pde" => Model::Pde,
                        other => {
                            return Err(err(
                                line,
                                format!("model must be ide or pde, got `{other}`"),
                            ))
                        }
                    }
                }
                "beta" => {
                    cfg.beta = number(line, value)?;
                    saw_beta = true;
                }
                "x_min" => cfg.x_min = number(line, value)?,
                "x_max" => cfg.x_max = number(line, value)?,
                "n_points" => {
                    cfg.n_points = value.parse().map_err(|_| {
                        err(line, format!("n_points must be an integer, got `{value}`"))
                    })?
                }
                "bump" => cfg.bumps.push(bump(line, value)?),
                "offset" => cfg.offset = number(line, value)?,
                "initial_level" => initial_level = Some(number(line, value)?),
                "initial_bump" => initial_bumps.push(bump(line, value)?),
                "dt" => cfg.dt = number(line, value)?,
                "t_final" => {
                    cfg.t_final = number(line, value)?;
                    saw_t_final = true;
                }
                "split" => cfg.splits = numbers(line, value)?,
                "snapshot" => cfg.snapshots = numbers(line, value)?,
                "epsilon" => cfg.epsilons = numbers(line, value)?,
                "output_dir" => cfg.output_dir = Some(PathBuf::from(value)),
                "check_radius" => cfg.check_radius = number(line, value)?,
                "selection_fraction" => cfg.selection_fraction = number(line, value)?,
                "check_rate_law" => cfg.checks.rate_law = flag(line, value)?,
                "check_weights" => cfg.checks.weights = flag(line, value)?,
                "check_equal_split" => cfg.checks.equal_split = flag(line, value)?,
                "check_total_mass" => cfg.checks.total_mass = flag(line, value)?,
                "check_selection" => cfg.checks.selection = flag(line, value)?,
                "check_off_peak" => cfg.checks.off_peak = flag(line, value)?,
                "check_extinct_region" => {
                    let k: usize = value
                        .parse()
                        .map_err(|_| err(line, format!("region index expected, got `{value}`")))?;
                    cfg.checks.extinct_region = (k > 0).then_some(k);
                }
                other => return Err(err(line, format!("unknown key `{other}`"))),
            }
        }

        if !saw_t_final {
            return Err(err(0, "missing `t_final`"));
        }
        if cfg.model == Model::Pde && !saw_beta {
            return Err(err(0, "the pde model needs `beta`"));
        }
        if cfg.model == Model::Ide && cfg.beta != 0.0 {
            return Err(err(0, "`beta` only applies to the pde model"));
        }
        cfg.initial = match (initial_level, initial_bumps.is_empty()) {
            (Some(_), false) => {
                return Err(err(
                    0,
                    "give either `initial_level` or `initial_bump` lines, not both",
                ))
            }
            (Some(level), true) => InitialCondition::Constant(level),
            (None, false) => InitialCondition::Bumps(initial_bumps),
            (None, true) => InitialCondition::Constant(2.0 / 3.0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::new(self.x_min, self.x_max, self.n_points)
    }

    pub fn landscape(&self) -> Result<Landscape> {
        if self.bumps.is_empty() {
            return Landscape::constant(self.offset, self.grid()?);
        }
        Landscape::new(self.bumps.clone(), self.offset, self.grid()?)
    }

    pub fn initial_density(&self) -> Result<Vec<f64>> {
        let grid = self.grid()?;
        Ok(match &self.initial {
            InitialCondition::Constant(level) => vec![*level; grid.len()],
            InitialCondition::Bumps(bumps) => {
                grid.sample(|x| bumps.iter().map(|b| b.eval(x)).sum())
            }
        })
    }

    /// Initial density as a function, for evaluation off the grid.
    pub fn initial_at(&self, x: f64) -> f64 {
        match &self.initial {
            InitialCondition::Constant(level) => *level,
            InitialCondition::Bumps(bumps) => bumps.iter().map(|b| b.eval(x)).sum(),
        }
    }

    pub fn sampling_plan(&self) -> SamplingPlan {
        SamplingPlan::default()
            .with_splits(&self.splits)
            .with_snapshots(&self.snapshots)
    }

    /// Stability bound of the explicit scheme for this configuration.
    pub fn stability_bound(&self) -> Result<f64> {
        Ok(stability_bound_for(
            &self.landscape()?,
            self.beta,
            &self.initial_density()?,
        ))
    }

    /// Every precondition of the configured run, checked up front.
    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        let landscape = self.landscape()?;
        let n0 = self.initial_density()?;
        selmut_core::trajectory::validate_density(&grid, &n0)?;
        if !(self.beta >= 0.0) {
            return Err(err(
                0,
                format!("beta must be non-negative, got {}", self.beta),
            ));
        }
        if !(self.dt > 0.0) {
            return Err(err(0, format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final > 0.0) {
            return Err(err(
                0,
                format!("t_final must be positive, got {}", self.t_final),
            ));
        }
        if let Some(s) = self
            .splits
            .iter()
            .find(|s| !(**s > grid.x_min() && **s < grid.x_max()))
        {
            return Err(err(0, format!("split point {s} outside the open domain")));
        }
        if self.splits.windows(2).any(|w| w[1] <= w[0]) {
            return Err(err(0, "split points must be strictly increasing"));
        }
        if let Some(t) = self
            .snapshots
            .iter()
            .find(|t| !(**t >= 0.0 && **t <= self.t_final))
        {
            return Err(err(0, format!("snapshot time {t} outside [0, t_final]")));
        }
        if self.epsilons.iter().any(|e| !(*e > 0.0))
            || self.epsilons.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(err(
                0,
                "epsilon list must be positive and strictly decreasing",
            ));
        }
        if !(self.check_radius > 0.0) {
            return Err(err(0, "check_radius must be positive"));
        }
        if !(self.selection_fraction > 0.0 && self.selection_fraction <= 1.0) {
            return Err(err(0, "selection_fraction must lie in (0, 1]"));
        }
        if let Some(k) = self.checks.extinct_region {
            if k > self.splits.len() + 1 {
                return Err(err(0, format!("region {k} does not exist")));
            }
        }
        if (self.checks.weights || self.checks.equal_split) && self.splits.is_empty() {
            return Err(err(0, "region checks need at least one split point"));
        }
        if self.checks.rate_law && self.model != Model::Ide {
            return Err(err(0, "check_rate_law applies to the ide model"));
        }
        let beta = match self.model {
            Model::Ide => 0.0,
            Model::Pde => self.beta,
        };
        let bound = stability_bound_for(&landscape, beta, &n0);
        if self.dt > bound {
            return Err(Error::StepTooLarge { dt: self.dt, bound });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2: &str = "
        # selection only
        name = fig2
        model = ide
        bump = 1, -0.5, 0.01
        bump = 1, 1, 0.1   # wide peak
        initial_level = 2/3
        t_final = 200
        split = 0.5
        check_weights = true
    ";

    #[test]
    fn parses_a_full_config() {
        let cfg = RunConfig::parse(FIG2).unwrap();
        assert_eq!(cfg.name, "fig2");
        assert_eq!(cfg.bumps.len(), 2);
        assert_eq!(cfg.initial, InitialCondition::Constant(2.0 / 3.0));
        assert_eq!(cfg.splits, vec![0.5]);
        assert!(cfg.checks.weights && !cfg.checks.rate_law);
        assert_eq!(cfg.n_points, 1000);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let e = RunConfig::parse(&format!("{FIG2}\ncolour = red")).unwrap_err();
        assert!(e.to_string().contains("unknown key"), "{e}");
        let e = RunConfig::parse(&format!("{FIG2}\nt_final = 3")).unwrap_err();
        assert!(e.to_string().contains("duplicate"), "{e}");
    }

    #[test]
    fn reports_line_numbers() {
        match RunConfig::parse("t_final = 1\nbump = 1, 2") {
            Err(Error::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unstable_step_shows_the_bound() {
        let text = FIG2
            .replace("model = ide", "model = pde\nbeta = 1e-3")
            .replace("check_weights = true", "");
        match RunConfig::parse(&text) {
            Err(e @ Error::StepTooLarge { .. }) => {
                assert!(e.is_validation());
                assert!(e.to_string().contains("0.0040"), "{e}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn precondition_failures() {
        assert!(RunConfig::parse("bump = 1, 0, 0.1").is_err());
        assert!(RunConfig::parse("t_final = 1\nbump = 1, 0, 0.1\nsplit = 5").is_err());
        assert!(RunConfig::parse("t_final = 1\nbump = 1, 0, 0.1\nsnapshot = 2").is_err());
        assert!(RunConfig::parse("t_final = 1\nbump = 1, 0, 0.1\ninitial_level = 0").is_err());
        assert!(RunConfig::parse("t_final = 1\nbump = 1, 0, 0.1\nbeta = 1e-6").is_err());
        assert!(RunConfig::parse("t_final = 1\nbump = 1, 0, 0.1\nepsilon = 1e-6, 1e-4").is_err());
        assert!(RunConfig::parse("t_final = 1\nbump = 1, 0, 0.1\nmodel = pde").is_err());
        assert!(RunConfig::parse(
            "t_final = 1\nbump = 1, 0, 0.1\ninitial_level = 1\ninitial_bump = 1,0,1"
        )
        .is_err());
    }

    #[test]
    fn bump_initial_condition() {
        let cfg =
            RunConfig::parse("t_final = 1\nbump = 1, 0, 0.1\ninitial_bump = 2, 0.5, 0.3").unwrap();
        let n0 = cfg.initial_density().unwrap();
        let grid = cfg.grid().unwrap();
        let k = grid.nearest(0.5);
        assert!((n0[k] - 2.0 * (-(grid.node(k) - 0.5).powi(2) / 0.3).exp()).abs() < 1e-15);
        assert_eq!(cfg.initial_at(0.5), 2.0);
    }
}
