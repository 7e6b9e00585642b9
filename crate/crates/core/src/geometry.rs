//! Two-layer topology: hexagonal macro grid, Poisson small cells and users,
//! nearest-cell association and the two sleeping rules.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::config::{LoadState, NetworkConfig, HEX_AREA};
use crate::error::{Error, Result};
use crate::rng::{self, Purpose};

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(self, other: Point) -> f64 {
        self.dist2(other).sqrt()
    }
}

/// Regular hexagon with circumradius `radius`, vertices at 30° + k·60°.
///
/// This is the Voronoi cell of a site in the lattice produced by [`hex_grid`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hexagon {
    pub center: Point,
    pub radius: f64,
}

impl Hexagon {
    pub fn new(center: Point, radius: f64) -> Self {
        Hexagon { center, radius }
    }

    pub fn area(&self) -> f64 {
        HEX_AREA * self.radius * self.radius
    }

    pub fn apothem(&self) -> f64 {
        0.5 * SQRT3 * self.radius
    }

    /// Closed containment test (boundary points are inside).
    pub fn contains(&self, p: Point) -> bool {
        let dx = p.x - self.center.x;
        let dy = p.y - self.center.y;
        let a = self.apothem() * (1.0 + 1e-12);
        // Edge normals at 0°, 60°, 120°.
        dx.abs() <= a
            && (0.5 * dx + 0.5 * SQRT3 * dy).abs() <= a
            && (-0.5 * dx + 0.5 * SQRT3 * dy).abs() <= a
    }

    pub fn vertex(&self, k: usize) -> Point {
        let theta = std::f64::consts::PI / 6.0 + k as f64 * std::f64::consts::PI / 3.0;
        Point::new(
            self.center.x + self.radius * theta.cos(),
            self.center.y + self.radius * theta.sin(),
        )
    }

    /// Uniform point: pick one of the six equal triangles, then a uniform point in it.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let k = rng.random_range(0..6);
        let a = self.vertex(k);
        let b = self.vertex((k + 1) % 6);
        let mut u: f64 = rng.random();
        let mut v: f64 = rng.random();
        if u + v > 1.0 {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        let c = self.center;
        Point::new(
            c.x + u * (a.x - c.x) + v * (b.x - c.x),
            c.y + u * (a.y - c.y) + v * (b.y - c.y),
        )
    }
}

/// Macro sites: the center site at the origin followed by `cfg.mbs_rings` rings.
///
/// Inter-site distance is `√3·D`, so the Voronoi cells are hexagons of
/// circumradius `D`.
pub fn hex_grid(cfg: &NetworkConfig) -> Vec<Point> {
    hex_lattice(cfg.d, cfg.mbs_rings)
}

pub fn hex_lattice(d: f64, rings: u32) -> Vec<Point> {
    let spacing = SQRT3 * d;
    let r = rings as i64;
    let mut sites = vec![Point::ORIGIN];
    // Axial directions, walking each ring counter-clockwise.
    let dirs: [(i64, i64); 6] = [(-1, 1), (-1, 0), (0, -1), (1, -1), (1, 0), (0, 1)];
    for ring in 1..=r {
        let (mut q, mut s) = (ring, 0i64);
        for &(dq, ds) in &dirs {
            for _ in 0..ring {
                let x = spacing * (q as f64 + 0.5 * s as f64);
                let y = spacing * (0.5 * SQRT3 * s as f64);
                sites.push(Point::new(x, y));
                q += dq;
                s += ds;
            }
        }
    }
    sites
}

/// The simulated area: the union of the macro hexagons.
#[derive(Debug, Clone)]
pub struct Region {
    cells: Vec<Hexagon>,
}

impl Region {
    pub fn from_sites(sites: &[Point], radius: f64) -> Self {
        Region {
            cells: sites.iter().map(|&c| Hexagon::new(c, radius)).collect(),
        }
    }

    pub fn for_config(cfg: &NetworkConfig) -> Self {
        Region::from_sites(&hex_grid(cfg), cfg.d)
    }

    /// A region made of a single hexagon.
    pub fn hexagon(h: Hexagon) -> Self {
        Region { cells: vec![h] }
    }

    pub fn cells(&self) -> &[Hexagon] {
        &self.cells
    }

    pub fn area(&self) -> f64 {
        self.cells.iter().map(Hexagon::area).sum()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.cells.iter().any(|h| h.contains(p))
    }

    /// Largest distance between any two points of the region (upper bound).
    pub fn diameter(&self) -> f64 {
        let mut far: f64 = 0.0;
        for a in &self.cells {
            for b in &self.cells {
                far = far.max(a.center.dist(b.center) + a.radius + b.radius);
            }
        }
        far
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        // Cells have equal area, so a uniform cell choice keeps the union uniform.
        let k = rng.random_range(0..self.cells.len());
        self.cells[k].sample(rng)
    }
}

/// Homogeneous PPP on `region` drawn from the given generator.
pub fn sample_ppp_with<R: Rng + ?Sized>(density: f64, region: &Region, rng: &mut R) -> Vec<Point> {
    let mean = density * region.area();
    if mean.is_nan() || mean <= 0.0 || region.cells.is_empty() {
        return Vec::new();
    }
    let n = Poisson::new(mean).expect("positive finite mean").sample(rng) as usize;
    (0..n).map(|_| region.sample(rng)).collect()
}

/// Homogeneous PPP on `region`, deterministic in `seed`.
pub fn sample_ppp(density: f64, region: &Region, seed: u64) -> Vec<Point> {
    sample_ppp_with(density, region, &mut rng::standalone(seed))
}

/// Nearest anchor for every point by exhaustive scan; ties go to the lowest index.
pub fn associate(points: &[Point], anchors: &[Point]) -> Result<Vec<usize>> {
    if anchors.is_empty() {
        return Err(Error::NoServingCell);
    }
    Ok(points
        .iter()
        .map(|&p| {
            let mut best = 0;
            let mut best_d = p.dist2(anchors[0]);
            for (i, &a) in anchors.iter().enumerate().skip(1) {
                let d = p.dist2(a);
                if d < best_d {
                    best = i;
                    best_d = d;
                }
            }
            best
        })
        .collect())
}

/// Uniform bucket grid for repeated nearest-anchor queries.
///
/// Gives the same answer as [`associate`], including the lowest-index tie rule.
#[derive(Debug, Clone)]
pub struct NearestIndex {
    anchors: Vec<Point>,
    min: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl NearestIndex {
    pub fn new(anchors: &[Point]) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::NoServingCell);
        }
        let (mut lo, mut hi) = (anchors[0], anchors[0]);
        for a in anchors {
            lo.x = lo.x.min(a.x);
            lo.y = lo.y.min(a.y);
            hi.x = hi.x.max(a.x);
            hi.y = hi.y.max(a.y);
        }
        let w = (hi.x - lo.x).max(1e-9);
        let h = (hi.y - lo.y).max(1e-9);
        // About two anchors per bucket.
        let cell = ((w * h) / anchors.len() as f64 * 2.0).sqrt().max(1e-9);
        let nx = ((w / cell).floor() as usize + 1).min(4096);
        let ny = ((h / cell).floor() as usize + 1).min(4096);
        let cell = (w / nx as f64).max(h / ny as f64).max(cell);
        let mut buckets = vec![Vec::new(); nx * ny];
        let mut idx = NearestIndex {
            anchors: anchors.to_vec(),
            min: lo,
            cell,
            nx,
            ny,
            buckets: Vec::new(),
        };
        for (i, &a) in anchors.iter().enumerate() {
            let (bx, by) = idx.bucket_of(a);
            buckets[by * nx + bx].push(i);
        }
        idx.buckets = buckets;
        Ok(idx)
    }

    fn bucket_of(&self, p: Point) -> (usize, usize) {
        let fx = ((p.x - self.min.x) / self.cell).floor();
        let fy = ((p.y - self.min.y) / self.cell).floor();
        let bx = fx.clamp(0.0, (self.nx - 1) as f64) as usize;
        let by = fy.clamp(0.0, (self.ny - 1) as f64) as usize;
        (bx, by)
    }

    pub fn anchors(&self) -> &[Point] {
        &self.anchors
    }

    pub fn nearest(&self, p: Point) -> usize {
        let (bx, by) = self.bucket_of(p);
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        let max_ring = self.nx.max(self.ny);
        for ring in 0..=max_ring {
            let x0 = bx as i64 - ring as i64;
            let x1 = bx as i64 + ring as i64;
            let y0 = by as i64 - ring as i64;
            let y1 = by as i64 + ring as i64;
            for y in y0..=y1 {
                if y < 0 || y >= self.ny as i64 {
                    continue;
                }
                for x in x0..=x1 {
                    if x < 0 || x >= self.nx as i64 {
                        continue;
                    }
                    if y != y0 && y != y1 && x != x0 && x != x1 {
                        continue;
                    }
                    for &i in &self.buckets[y as usize * self.nx + x as usize] {
                        let d = p.dist2(self.anchors[i]);
                        if d < best_d || (d == best_d && i < best) {
                            best = i;
                            best_d = d;
                        }
                    }
                }
            }
            // Anchors in unvisited buckets are at least `ring * cell` away, also for
            // query points outside the grid box.
            if best != usize::MAX {
                let reach = ring as f64 * self.cell;
                if reach * reach > best_d {
                    break;
                }
            }
        }
        best
    }

    pub fn associate(&self, points: &[Point]) -> Vec<usize> {
        points.iter().map(|&p| self.nearest(p)).collect()
    }
}

/// Set of sleeping small cells, stored as a membership mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SleepSet {
    asleep: Vec<bool>,
}

impl SleepSet {
    pub fn none(n: usize) -> Self {
        SleepSet { asleep: vec![false; n] }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.asleep[i]
    }

    pub fn len(&self) -> usize {
        self.asleep.iter().filter(|&&s| s).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn universe(&self) -> usize {
        self.asleep.len()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.asleep
            .iter()
            .enumerate()
            .filter_map(|(i, &s)| s.then_some(i))
            .collect()
    }

    pub fn is_subset(&self, other: &SleepSet) -> bool {
        self.asleep.len() == other.asleep.len()
            && self.asleep.iter().zip(&other.asleep).all(|(&a, &b)| !a || b)
    }

    pub fn mask(&self) -> &[bool] {
        &self.asleep
    }
}

/// Small cells strictly closer than `r_s` to their nearest macro site.
pub fn repulsive_sleep_set(sc_positions: &[Point], mbs_positions: &[Point], r_s: f64) -> SleepSet {
    let r2 = r_s * r_s;
    SleepSet {
        asleep: sc_positions
            .iter()
            .map(|&s| mbs_positions.iter().any(|&m| s.dist2(m) < r2))
            .collect(),
    }
}

pub fn random_sleep_set_with<R: Rng + ?Sized>(sc_count: usize, p_s: f64, rng: &mut R) -> SleepSet {
    SleepSet {
        asleep: (0..sc_count).map(|_| rng.random::<f64>() < p_s).collect(),
    }
}

/// Each small cell sleeps independently with probability `p_s`.
pub fn random_sleep_set(sc_count: usize, p_s: f64, seed: u64) -> Result<SleepSet> {
    if !(0.0..=1.0).contains(&p_s) {
        return Err(Error::InvalidParameter {
            field: "p_s",
            reason: format!("{p_s} must lie in [0, 1]"),
        });
    }
    Ok(random_sleep_set_with(sc_count, p_s, &mut rng::standalone(seed)))
}

/// Positions of every entity plus the nearest-cell association of each user.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub mbs_positions: Vec<Point>,
    pub sc_positions: Vec<Point>,
    pub mbs_ue_positions: Vec<Point>,
    pub sc_ue_positions: Vec<Point>,
    /// Serving macro site of each macro user.
    pub mbs_ue_cell: Vec<usize>,
    /// Serving small cell of each small-cell user (empty when there are no SCs).
    pub sc_ue_cell: Vec<usize>,
}

impl Topology {
    /// Draws one realization for trial `trial` of experiment `seed`.
    pub fn generate(cfg: &NetworkConfig, load: &LoadState, seed: u64, trial: u64) -> Self {
        let mbs = hex_grid(cfg);
        let region = Region::from_sites(&mbs, cfg.d);
        let sc = sample_ppp_with(cfg.rho_s, &region, &mut rng::substream(seed, trial, Purpose::SmallCells));
        let sc_ue = sample_ppp_with(
            load.lambda_s,
            &region,
            &mut rng::substream(seed, trial, Purpose::SmallCellUsers),
        );
        let mbs_ue = sample_ppp_with(
            load.lambda_m,
            &region,
            &mut rng::substream(seed, trial, Purpose::MacroUsers),
        );
        Topology::from_positions(mbs, sc, mbs_ue, sc_ue)
    }

    pub fn from_positions(
        mbs_positions: Vec<Point>,
        sc_positions: Vec<Point>,
        mbs_ue_positions: Vec<Point>,
        sc_ue_positions: Vec<Point>,
    ) -> Self {
        let mbs_ue_cell = match NearestIndex::new(&mbs_positions) {
            Ok(idx) => idx.associate(&mbs_ue_positions),
            Err(_) => Vec::new(),
        };
        let sc_ue_cell = match NearestIndex::new(&sc_positions) {
            Ok(idx) => idx.associate(&sc_ue_positions),
            Err(_) => Vec::new(),
        };
        Topology {
            mbs_positions,
            sc_positions,
            mbs_ue_positions,
            sc_ue_positions,
            mbs_ue_cell,
            sc_ue_cell,
        }
    }

    /// Line-oriented dump: `MBS x y`, `SC x y`, `UEM x y`, `UES x y`, meters.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let groups: [(&str, &[Point]); 4] = [
            ("MBS", &self.mbs_positions),
            ("SC", &self.sc_positions),
            ("UEM", &self.mbs_ue_positions),
            ("UES", &self.sc_ue_positions),
        ];
        for (tag, pts) in groups {
            for p in pts {
                let _ = writeln!(out, "{tag} {} {}", p.x, p.y);
            }
        }
        out
    }

    /// Parses the dump format; associations are recomputed.
    pub fn from_text(text: &str) -> Result<Self> {
        let (mut mbs, mut sc, mut uem, mut ues) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line: n + 1, message };
            let mut it = line.split_whitespace();
            let tag = it.next().unwrap_or_default();
            let coords: Vec<f64> = it
                .map(|t| t.parse::<f64>().map_err(|e| parse_err(format!("{t:?}: {e}"))))
                .collect::<Result<_>>()?;
            if coords.len() != 2 || !coords.iter().all(|c| c.is_finite()) {
                return Err(parse_err(format!("expected two finite coordinates, got {line:?}")));
            }
            let p = Point::new(coords[0], coords[1]);
            match tag {
                "MBS" => mbs.push(p),
                "SC" => sc.push(p),
                "UEM" => uem.push(p),
                "UES" => ues.push(p),
                other => return Err(parse_err(format!("unknown record type {other:?}"))),
            }
        }
        Ok(Topology::from_positions(mbs, sc, uem, ues))
    }
}
