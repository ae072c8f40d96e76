//! Definition files, rasterization and PGM output.
//!
//! A definition file is TOML:
//!
//! ```toml
//! dimension = 2
//! order = 2
//! probabilities = [0.5, 0.5]      # optional
//!
//! [[maps]]
//! matrices = [[[0.1, 0.0], [0.0, 0.16]], [[0.15, 0.04], [-0.04, 0.15]]]
//! translation = [0.0, 1.6]
//!
//! [render]                        # optional, every key optional
//! algorithm = "chaos"
//! points = 100000
//! seed = 42
//! width = 512
//! height = 512
//! viewport = [0.0, 2.5, 0.0, 2.5] # x0, x1, y0, y1
//! ```
//!
//! A matrix may also be given as one flat row-major list of `d * d` numbers.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::affine::{attractor_shortcut, attractor_shortcut_decimated, build_tables_full, TableOptions};
use crate::budget::Budget;
use crate::chaos::{chaos_run, ChaosOptions, RngSpec};
use crate::deterministic::{default_seeds, det_run, det_run_simplified, DetOptions};
use crate::error::{GifsError, Result};
use crate::exec::Execution;
use crate::metric::hausdorff_distance_with;
use crate::point::{Point, PointCloud};
use crate::system::{AffineMap, GifsSystem, Matrix};

pub const DEFAULT_WIDTH: usize = 512;
pub const DEFAULT_HEIGHT: usize = 512;
pub const DEFAULT_MARGIN: f64 = 0.05;
pub const GAMMA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Deterministic,
    #[default]
    DeterministicSimplified,
    Chaos,
    AffineShortcut,
    AffineFull,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Deterministic,
        Algorithm::DeterministicSimplified,
        Algorithm::Chaos,
        Algorithm::AffineShortcut,
        Algorithm::AffineFull,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Deterministic => "deterministic",
            Algorithm::DeterministicSimplified => "deterministic-simplified",
            Algorithm::Chaos => "chaos",
            Algorithm::AffineShortcut => "affine-shortcut",
            Algorithm::AffineFull => "affine-full",
        }
    }

    /// Depth used when none is configured.
    pub fn default_depth(self) -> usize {
        match self {
            Algorithm::Deterministic => 10,
            Algorithm::DeterministicSimplified => 6,
            Algorithm::Chaos => 0,
            Algorithm::AffineShortcut => 4,
            Algorithm::AffineFull => 3,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = GifsError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                GifsError::config("algorithm", format!("unknown `{s}`, expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RasterMode {
    #[default]
    Density,
    Binary,
}

/// Axis-aligned box `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Viewport {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        let ok = [x0, x1, y0, y1].iter().all(|v| v.is_finite()) && x1 > x0 && y1 > y0;
        if !ok {
            return Err(GifsError::config("viewport", "needs finite bounds with x0 < x1 and y0 < y1"));
        }
        Ok(Viewport { x0, x1, y0, y1 })
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }
}

impl FromStr for Viewport {
    type Err = GifsError;

    /// `x0,x1,y0,y1`.
    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| GifsError::config("viewport", e.to_string()))?;
        match v[..] {
            [x0, x1, y0, y1] => Viewport::new(x0, x1, y0, y1),
            _ => Err(GifsError::config("viewport", "expected four comma-separated numbers")),
        }
    }
}

impl fmt::Display for Viewport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.x0, self.x1, self.y0, self.y1)
    }
}

// ---------------------------------------------------------------------------
// File schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum MatrixSpec {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapSpec {
    matrices: Vec<MatrixSpec>,
    translation: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RenderSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    algorithm: Option<Algorithm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    burn_in: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    width: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    height: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    viewport: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decimation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<RasterMode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSpec {
    dimension: usize,
    order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    probabilities: Option<Vec<f64>>,
    maps: Vec<MapSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    render: Option<RenderSpec>,
}

/// Everything needed to produce an image. Unset numeric fields fall back to
/// per-algorithm defaults when run.
#[derive(Debug, Clone)]
pub struct RenderConfig {
    pub system: GifsSystem,
    pub algorithm: Algorithm,
    pub depth: Option<usize>,
    pub points: Option<usize>,
    pub burn_in: Option<usize>,
    pub seed: u64,
    pub width: usize,
    pub height: usize,
    pub viewport: Option<Viewport>,
    pub decimation: Option<f64>,
    pub mode: RasterMode,
}

impl RenderConfig {
    pub fn new(system: GifsSystem) -> Self {
        RenderConfig {
            system,
            algorithm: Algorithm::default(),
            depth: None,
            points: None,
            burn_in: None,
            seed: 0,
            width: DEFAULT_WIDTH,
            height: DEFAULT_HEIGHT,
            viewport: None,
            decimation: None,
            mode: RasterMode::default(),
        }
    }

    /// Checks the render-side invariants.
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(GifsError::config("width/height", "must be at least 1"));
        }
        if let Some(r) = self.decimation {
            if !(r > 0.0 && r.is_finite()) {
                return Err(GifsError::config("decimation", "must be positive"));
            }
        }
        if let Some(v) = &self.viewport {
            Viewport::new(v.x0, v.x1, v.y0, v.y1)?;
        }
        if self.depth == Some(0) {
            return Err(GifsError::config("depth", "must be at least 1"));
        }
        Ok(())
    }
}

/// A parsed definition plus non-fatal findings.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub config: RenderConfig,
    pub warnings: Vec<String>,
}

fn matrix_from_spec(spec: &MatrixSpec, d: usize) -> Result<Matrix> {
    match spec {
        MatrixSpec::Rows(rows) => {
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(GifsError::config("matrices", format!("expected {d}x{d} rows")));
            }
            Matrix::from_rows(rows)
        }
        MatrixSpec::Flat(v) => Matrix::from_row_major(d, v)
            .map_err(|_| GifsError::config("matrices", format!("expected {} numbers", d * d))),
    }
}

/// Parses a definition file. Contractivity failures are warnings unless
/// `strict` is set.
pub fn parse_config(text: &str, strict: bool) -> Result<Parsed> {
    let spec: FileSpec = toml::from_str(text).map_err(|e| GifsError::Parse(e.message().to_string()))?;
    let (d, m) = (spec.dimension, spec.order);
    if d == 0 || m == 0 {
        return Err(GifsError::config("dimension/order", "must be at least 1"));
    }
    if spec.maps.is_empty() {
        return Err(GifsError::config("maps", "at least one map is required"));
    }
    let mut maps = Vec::with_capacity(spec.maps.len());
    for (i, ms) in spec.maps.iter().enumerate() {
        if ms.matrices.len() != m {
            return Err(GifsError::config(
                format!("maps[{i}].matrices"),
                format!("expected {m} matrices for order {m}, got {}", ms.matrices.len()),
            ));
        }
        if ms.translation.len() != d {
            return Err(GifsError::config(
                format!("maps[{i}].translation"),
                format!("expected {d} numbers, got {}", ms.translation.len()),
            ));
        }
        let mats = ms
            .matrices
            .iter()
            .map(|s| matrix_from_spec(s, d))
            .collect::<Result<Vec<_>>>()?;
        maps.push(AffineMap::new(mats, ms.translation.clone())?);
    }
    let mut system = GifsSystem::affine(maps)?;
    if let Some(p) = spec.probabilities {
        system = system.with_probabilities(p)?;
    }

    let report = system.validate_contractive();
    let mut warnings = Vec::new();
    if !report.pass {
        if strict {
            return Err(GifsError::config("maps", format!("system is not contractive: {report}")));
        }
        warnings.push(format!("system may not be contractive: {report}"));
    }

    let r = spec.render.unwrap_or_default();
    let config = RenderConfig {
        system,
        algorithm: r.algorithm.unwrap_or_default(),
        depth: r.depth,
        points: r.points,
        burn_in: r.burn_in,
        seed: r.seed.unwrap_or(0),
        width: r.width.unwrap_or(DEFAULT_WIDTH),
        height: r.height.unwrap_or(DEFAULT_HEIGHT),
        viewport: r
            .viewport
            .map(|[a, b, c, e]| Viewport::new(a, b, c, e))
            .transpose()?,
        decimation: r.decimation,
        mode: r.mode.unwrap_or_default(),
    };
    config.validate()?;
    Ok(Parsed { config, warnings })
}

pub fn load_config(path: &Path, strict: bool) -> Result<Parsed> {
    let text = std::fs::read_to_string(path).map_err(|source| GifsError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, strict)
}

/// Serializes a config back to the file schema. Matrices are written as rows.
pub fn serialize_config(config: &RenderConfig) -> Result<String> {
    let g = &config.system;
    let maps = g
        .affine_maps()?
        .into_iter()
        .map(|f| MapSpec {
            matrices: f.matrices().iter().map(|a| MatrixSpec::Rows(a.rows())).collect(),
            translation: f.translation().to_vec(),
        })
        .collect();
    let spec = FileSpec {
        dimension: g.dim(),
        order: g.order(),
        probabilities: g.probabilities().map(<[f64]>::to_vec),
        maps,
        render: Some(RenderSpec {
            algorithm: Some(config.algorithm),
            depth: config.depth,
            points: config.points,
            burn_in: config.burn_in,
            seed: Some(config.seed),
            width: Some(config.width),
            height: Some(config.height),
            viewport: config.viewport.map(|v| [v.x0, v.x1, v.y0, v.y1]),
            decimation: config.decimation,
            mode: Some(config.mode),
        }),
    };
    toml::to_string(&spec).map_err(|e| GifsError::Parse(e.to_string()))
}

// ---------------------------------------------------------------------------
// Running an algorithm
// ---------------------------------------------------------------------------

/// Computes the point cloud a config describes.
pub fn compute_cloud(config: &RenderConfig, exec: Execution) -> Result<PointCloud> {
    let g = &config.system;
    let depth = config.depth.unwrap_or(config.algorithm.default_depth());
    let det = DetOptions {
        decimation: config.decimation,
        exec,
        budget: None,
    };
    match config.algorithm {
        Algorithm::Deterministic => det_run(g, default_seeds(g)?, depth, &det),
        Algorithm::DeterministicSimplified => {
            det_run_simplified(g, PointCloud::singleton(g.fixed_point(0)?), depth, &det)
        }
        Algorithm::Chaos => {
            let opts = ChaosOptions {
                x0: None,
                burn_in: config.burn_in,
                rng: RngSpec::new(config.seed),
            };
            chaos_run(g, config.points.unwrap_or(100_000), &opts)
        }
        Algorithm::AffineShortcut => match config.decimation {
            Some(r) => attractor_shortcut_decimated(g, depth, r, Budget::tables(), exec),
            None => attractor_shortcut(g, depth, Budget::tables()),
        },
        Algorithm::AffineFull => {
            let opts = TableOptions {
                top_level_matrices: false,
                exec,
                ..Default::default()
            };
            build_tables_full(g, depth, &opts)?.b_cloud(depth)
        }
    }
}

// ---------------------------------------------------------------------------
// Rasterization
// ---------------------------------------------------------------------------

/// 8-bit grayscale image, row-major, top row first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl RasterImage {
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }
}

/// Bounding box grown by `margin` of its extent per side; a zero-extent
/// axis becomes a unit interval around its value.
pub fn auto_viewport(cloud: &PointCloud, margin: f64) -> Result<Viewport> {
    cloud.require_nonempty()?;
    if cloud.dim() != 2 {
        return Err(GifsError::Dimension {
            expected: 2,
            got: cloud.dim(),
        });
    }
    let bb = cloud.bounding_box().expect("nonempty");
    let grow = |(lo, hi): (f64, f64)| {
        let ext = hi - lo;
        if ext > 0.0 {
            (lo - margin * ext, hi + margin * ext)
        } else {
            (lo - 0.5, hi + 0.5)
        }
    };
    let (x0, x1) = grow(bb[0]);
    let (y0, y1) = grow(bb[1]);
    Viewport::new(x0, x1, y0, y1)
}

/// Result of binning a cloud.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub image: RasterImage,
    /// Points outside the viewport, which are not drawn.
    pub outside: usize,
}

/// Bins a 2-D cloud into pixels; boundary points are clamped inward.
pub fn rasterize(
    cloud: &PointCloud,
    viewport: &Viewport,
    width: usize,
    height: usize,
    mode: RasterMode,
) -> Result<Raster> {
    if cloud.dim() != 2 {
        return Err(GifsError::Dimension {
            expected: 2,
            got: cloud.dim(),
        });
    }
    if width == 0 || height == 0 {
        return Err(GifsError::config("width/height", "must be at least 1"));
    }
    let dx = (viewport.x1 - viewport.x0) / width as f64;
    let dy = (viewport.y1 - viewport.y0) / height as f64;
    let mut counts = vec![0u64; width * height];
    let mut outside = 0;
    for p in cloud {
        let (x, y) = (p.coords()[0], p.coords()[1]);
        if !viewport.contains(x, y) {
            outside += 1;
            continue;
        }
        let px = (((x - viewport.x0) / dx).floor() as usize).min(width - 1);
        let py = (((viewport.y1 - y) / dy).floor() as usize).min(height - 1);
        counts[py * width + px] += 1;
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    let pixels = counts
        .iter()
        .map(|&c| match (mode, c) {
            (_, 0) => 0,
            (RasterMode::Binary, _) => 255,
            (RasterMode::Density, c) => (255.0 * (c as f64 / max as f64).powf(GAMMA)).round() as u8,
        })
        .collect();
    Ok(Raster {
        image: RasterImage {
            width,
            height,
            pixels,
        },
        outside,
    })
}

/// Binary PGM bytes: `P5\n<w> <h>\n255\n` then the pixels.
pub fn encode_pgm(img: &RasterImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.pixels);
    out
}

pub fn write_pgm(img: &RasterImage, path: &Path) -> Result<()> {
    std::fs::write(path, encode_pgm(img)).map_err(|source| GifsError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses the exact layout produced by [`encode_pgm`] (single whitespace
/// separators, no comments, maxval 255).
pub fn decode_pgm(bytes: &[u8]) -> Result<RasterImage> {
    let bad = || GifsError::Parse("not an 8-bit binary PGM".into());
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos == start || pos >= bytes.len() {
            return Err(bad());
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad())?);
        pos += 1;
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    if fields[0] != "P5" || num(fields[3])? != 255 {
        return Err(bad());
    }
    let (width, height) = (num(fields[1])?, num(fields[2])?);
    let pixels = bytes[pos..].to_vec();
    if pixels.len() != width * height {
        return Err(bad());
    }
    Ok(RasterImage {
        width,
        height,
        pixels,
    })
}

pub fn read_pgm(path: &Path) -> Result<RasterImage> {
    let bytes = std::fs::read(path).map_err(|source| GifsError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode_pgm(&bytes)
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub distance: f64,
    pub len_a: usize,
    pub len_b: usize,
    pub bbox_a: Vec<(f64, f64)>,
    pub bbox_b: Vec<(f64, f64)>,
}

impl CompareReport {
    pub fn within(&self, threshold: f64) -> bool {
        self.distance <= threshold
    }
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bbox = |b: &[(f64, f64)]| {
            b.iter()
                .map(|(lo, hi)| format!("[{lo:.6}, {hi:.6}]"))
                .collect::<Vec<_>>()
                .join(" x ")
        };
        writeln!(f, "hausdorff distance: {:.6e}", self.distance)?;
        writeln!(f, "A: {} points, box {}", self.len_a, bbox(&self.bbox_a))?;
        write!(f, "B: {} points, box {}", self.len_b, bbox(&self.bbox_b))
    }
}

pub fn compare_runs(a: &PointCloud, b: &PointCloud, exec: Execution) -> Result<CompareReport> {
    let distance = hausdorff_distance_with(a, b, exec)?;
    Ok(CompareReport {
        distance,
        len_a: a.len(),
        len_b: b.len(),
        bbox_a: a.bounding_box().unwrap_or_default(),
        bbox_b: b.bounding_box().unwrap_or_default(),
    })
}

/// Convenience: the point at the centre of a viewport.
pub fn viewport_center(v: &Viewport) -> Point {
    Point::from([(v.x0 + v.x1) / 2.0, (v.y0 + v.y1) / 2.0])
}

#[cfg(test)]
mod tests {
    use super::*;

    const F_PAIR: &str = r#"
dimension = 2
order = 2

[[maps]]
matrices = [[[0.1, 0.0], [0.0, 0.16]], [[0.15, 0.04], [-0.04, 0.15]]]
translation = [0.0, 1.6]

[[maps]]
matrices = [[0.1, -0.15, 0.15, 0.15], [[-0.1, 0.15], [0.15, 0.0]]]
translation = [1.6, 0.07]
"#;

    #[test]
    fn parses_both_matrix_forms() {
        let p = parse_config(F_PAIR, true).unwrap();
        let g = &p.config.system;
        assert_eq!((g.dim(), g.order(), g.len()), (2, 2, 2));
        assert!(p.warnings.is_empty());
        let f = g.affine_maps().unwrap();
        assert_eq!(f[1].matrix(0).get(0, 1), -0.15);
    }

    #[test]
    fn round_trip() {
        let mut c = parse_config(F_PAIR, false).unwrap().config;
        c.viewport = Some(Viewport::new(-1.0, 3.0, 0.0, 2.5).unwrap());
        c.decimation = Some(0.01);
        let text = serialize_config(&c).unwrap();
        let again = parse_config(&text, false).unwrap().config;
        assert_eq!(serialize_config(&again).unwrap(), text);
    }

    #[test]
    fn schema_errors() {
        let empty = "dimension = 2\norder = 2\nmaps = []\n";
        assert!(matches!(parse_config(empty, false), Err(GifsError::Config { .. })));
        let probs = F_PAIR.replace("order = 2\n", "order = 2\nprobabilities = [0.5, 0.4]\n");
        match parse_config(&probs, false) {
            Err(e) => assert!(e.to_string().contains("probabilities")),
            Ok(_) => panic!("bad probabilities accepted"),
        }
        let unknown = F_PAIR.replace("order = 2\n", "order = 2\ncolour = 1\n");
        assert!(matches!(parse_config(&unknown, false), Err(GifsError::Parse(_))));
    }

    #[test]
    fn strict_rejects_expanding_systems() {
        let text = "dimension = 1\norder = 1\n[[maps]]\nmatrices = [[[2.0]]]\ntranslation = [0.0]\n";
        assert_eq!(parse_config(text, false).unwrap().warnings.len(), 1);
        assert!(parse_config(text, true).is_err());
    }

    #[test]
    fn viewports() {
        let one = PointCloud::singleton(Point::from([2.0, -1.0]));
        assert_eq!(auto_viewport(&one, 0.05).unwrap(), Viewport::new(1.5, 2.5, -1.5, -0.5).unwrap());
        let two = PointCloud::from_points([Point::from([0.0, 0.0]), Point::from([1.0, 1.0])]).unwrap();
        let v = auto_viewport(&two, 0.05).unwrap();
        assert!((v.x0 + 0.05).abs() < 1e-15 && (v.y1 - 1.05).abs() < 1e-15);
        assert!("0,1,2".parse::<Viewport>().is_err());
        assert!("0,1,2,2".parse::<Viewport>().is_err());
    }

    #[test]
    fn pixel_mapping_and_clamp() {
        let v = Viewport::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let c = PointCloud::singleton(viewport_center(&v));
        let r = rasterize(&c, &v, 101, 101, RasterMode::Binary).unwrap();
        assert_eq!(r.image.get(50, 50), 255);
        assert_eq!(r.image.pixels.iter().filter(|&&p| p > 0).count(), 1);
        let corner = PointCloud::from_points([Point::from([1.0, 1.0]), Point::from([5.0, 5.0])]).unwrap();
        let r = rasterize(&corner, &v, 10, 10, RasterMode::Density).unwrap();
        assert_eq!(r.image.get(9, 0), 255);
        assert_eq!(r.outside, 1);
    }

    #[test]
    fn pgm_bytes() {
        let img = RasterImage {
            width: 1,
            height: 1,
            pixels: vec![255],
        };
        assert_eq!(encode_pgm(&img), b"P5\n1 1\n255\n\xff");
        let img = RasterImage {
            width: 3,
            height: 2,
            pixels: vec![0, 10, 20, 30, 40, 50],
        };
        assert_eq!(decode_pgm(&encode_pgm(&img)).unwrap(), img);
        assert!(decode_pgm(b"P2\n1 1\n255\n\x00").is_err());
    }

    #[test]
    fn compare_identical_and_disjoint() {
        let a = PointCloud::singleton(Point::from([0.0, 0.0]));
        let b = PointCloud::singleton(Point::from([1.0, 0.0]));
        assert!(compare_runs(&a, &a, Execution::Sequential).unwrap().within(0.0));
        assert!(!compare_runs(&a, &b, Execution::Sequential).unwrap().within(0.5));
    }
}
