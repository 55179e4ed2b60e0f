//! Concrete line arrangements and their conversion to wiring diagrams,
//! plus the named generators: regular-polygon extensions and the bicolored
//! extremal instance built from a regular polygon with blue twin pairs.
//!
//! All generator geometry is exact (cyclotomic coordinates); user-supplied
//! line sets may be rational (exact) or float (tolerance 1e-9).

use crate::error::{Error, Result};
use crate::exact::{CycEl, CycloField, EpsF64, GeomScalar};
use crate::wiring::{LineColor, WiringDiagram};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::rc::Rc;

/// A line `a*x + b*y = c` with `b != 0` (no verticals), so `slope = -a/b`.
#[derive(Clone, Debug)]
pub struct GLine<S> {
    pub a: S,
    pub b: S,
    pub c: S,
}

/// Homogeneous point `(x/w, y/w)` with `w` kept sign-positive.
#[derive(Clone, Debug)]
pub struct HPoint<S> {
    pub x: S,
    pub y: S,
    pub w: S,
}

impl<S: GeomScalar> HPoint<S> {
    fn normalized(mut self) -> Self {
        if self.w.sign() < 0 {
            self.x = self.x.neg();
            self.y = self.y.neg();
            self.w = self.w.neg();
        }
        self
    }
}

/// Crossing point of two lines; `None` when parallel (within tolerance for
/// the float scalar).
pub fn cross_point<S: GeomScalar>(l1: &GLine<S>, l2: &GLine<S>) -> Option<HPoint<S>> {
    let det = l1.a.mul(&l2.b).sub(&l2.a.mul(&l1.b));
    if det.sign() == 0 {
        return None;
    }
    let x = l1.c.mul(&l2.b).sub(&l2.c.mul(&l1.b));
    let y = l1.a.mul(&l2.c).sub(&l2.a.mul(&l1.c));
    Some(
        HPoint {
            x,
            y,
            w: det,
        }
        .normalized(),
    )
}

/// Sign of `a*x + b*y - c` at a homogeneous point with positive `w`.
pub fn side_of_line<S: GeomScalar>(l: &GLine<S>, p: &HPoint<S>) -> i8 {
    l.a.mul(&p.x)
        .add(&l.b.mul(&p.y))
        .sub(&l.c.mul(&p.w))
        .sign()
}

/// Compares the x-coordinates of two homogeneous points (positive `w`).
fn cmp_x<S: GeomScalar>(p: &HPoint<S>, q: &HPoint<S>) -> std::cmp::Ordering {
    match p.x.mul(&q.w).sub(&q.x.mul(&p.w)).sign() {
        s if s < 0 => std::cmp::Ordering::Less,
        0 => std::cmp::Ordering::Equal,
        _ => std::cmp::Ordering::Greater,
    }
}

/// Slope comparison: `slope(i) > slope(j)`?
fn slope_gt<S: GeomScalar>(li: &GLine<S>, lj: &GLine<S>) -> std::cmp::Ordering {
    // slope_i - slope_j = (a_j*b_i - a_i*b_j) / (b_i*b_j)
    let num = lj.a.mul(&li.b).sub(&li.a.mul(&lj.b));
    let den_sign = li.b.sign() * lj.b.sign();
    debug_assert!(den_sign != 0);
    match num.sign() * den_sign {
        s if s > 0 => std::cmp::Ordering::Greater,
        0 => std::cmp::Ordering::Equal,
        _ => std::cmp::Ordering::Less,
    }
}

/// Sweep conversion of a set of pairwise non-parallel lines to a wiring
/// diagram. Returns the diagram together with the wire permutation:
/// `wires[p]` is the input index of the pseudoline on wire `p+1` (bottom
/// wire first) at x -> -infinity.
///
/// Errors on parallel lines and on coinciding crossing x-coordinates (the
/// strict simplicity required by the full pipeline).
pub fn sweep_to_wiring<S: GeomScalar>(lines: &[GLine<S>]) -> Result<(WiringDiagram, Vec<usize>)> {
    let n = lines.len();
    if n == 0 {
        return Err(Error::BadParameter("empty line set".into()));
    }
    for (i, l) in lines.iter().enumerate() {
        if l.b.sign() == 0 {
            return Err(Error::BadParameter(format!("line {i} is vertical")));
        }
    }
    // Initial wire order: descending slope bottom to top (the steepest line
    // is lowest far to the left).
    let mut order: Vec<usize> = (0..n).collect();
    let mut parallel: Option<(usize, usize)> = None;
    order.sort_by(|&i, &j| match slope_gt(&lines[i], &lines[j]) {
        std::cmp::Ordering::Equal => {
            parallel = Some((i.min(j), i.max(j)));
            std::cmp::Ordering::Equal
        }
        o => o.reverse(),
    });
    // sort_by may skip comparing some equal pairs; re-check neighbors.
    for w in order.windows(2) {
        if slope_gt(&lines[w[0]], &lines[w[1]]) == std::cmp::Ordering::Equal {
            parallel = Some((w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    if let Some((i, j)) = parallel {
        return Err(Error::ParallelLines(i, j));
    }

    // All crossings, sorted by x.
    let mut crossings: Vec<(usize, usize, HPoint<S>)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let p = cross_point(&lines[i], &lines[j])
                .ok_or(Error::ParallelLines(i, j))?;
            crossings.push((i, j, p));
        }
    }
    crossings.sort_by(|a, b| cmp_x(&a.2, &b.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    for w in crossings.windows(2) {
        if cmp_x(&w[0].2, &w[1].2) == std::cmp::Ordering::Equal {
            return Err(Error::CoincidentCrossings(format!(
                "crossings ({},{}) and ({},{}) share their x-coordinate",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
    }

    // Execute the sweep.
    let wires = order.clone();
    let mut pos = vec![0usize; n]; // line -> 0-based wire position
    for (p, &line) in order.iter().enumerate() {
        pos[line] = p;
    }
    let mut word = Vec::with_capacity(crossings.len());
    for &(i, j, _) in &crossings {
        let (pi, pj) = (pos[i], pos[j]);
        if pi.abs_diff(pj) != 1 {
            return Err(Error::internal(format!(
                "crossing of lines {i},{j} while not adjacent (positions {pi},{pj})"
            )));
        }
        let low = pi.min(pj);
        word.push(low + 1);
        pos[i] = pj;
        pos[j] = pi;
    }
    Ok((WiringDiagram::new(n, word)?, wires))
}

// ---------------------------------------------------------------------
// user-facing line sets (slope/intercept rows, rational or float)
// ---------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub enum Coef {
    Rational(BigRational),
    Float(f64),
}

impl Coef {
    pub fn parse(tok: &str) -> Result<Coef> {
        if let Some((p, q)) = tok.split_once('/') {
            let p: BigInt = p
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational {tok:?}")))?;
            let q: BigInt = q
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational {tok:?}")))?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {tok:?}")));
            }
            return Ok(Coef::Rational(BigRational::new(p, q)));
        }
        if let Ok(i) = tok.parse::<BigInt>() {
            return Ok(Coef::Rational(BigRational::from_integer(i)));
        }
        tok.parse::<f64>()
            .map(Coef::Float)
            .map_err(|_| Error::Parse(format!("bad number {tok:?}")))
    }

    fn as_rational(&self) -> Option<BigRational> {
        match self {
            Coef::Rational(q) => Some(q.clone()),
            Coef::Float(_) => None,
        }
    }

    fn as_f64(&self) -> f64 {
        match self {
            Coef::Rational(q) => q.to_f64().unwrap_or(f64::NAN),
            Coef::Float(v) => *v,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LineSet {
    /// `(slope, intercept)` rows.
    pub lines: Vec<(Coef, Coef)>,
    pub colors: Option<Vec<LineColor>>,
}

impl LineSet {
    /// Text format: `lines <n>` header, then `slope intercept [R|B]` rows.
    /// Rationals are written `p/q`. Comment lines start with `#`.
    pub fn parse(text: &str) -> Result<LineSet> {
        let mut rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = rows.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let n: usize = header
            .strip_prefix("lines")
            .map(str::trim)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}, expected `lines <n>`")))?;
        let mut lines = Vec::with_capacity(n);
        let mut colors: Vec<LineColor> = Vec::new();
        for row in rows {
            let toks: Vec<&str> = row.split_whitespace().collect();
            if toks.len() < 2 || toks.len() > 3 {
                return Err(Error::Parse(format!("bad row {row:?}")));
            }
            lines.push((Coef::parse(toks[0])?, Coef::parse(toks[1])?));
            if toks.len() == 3 {
                colors.push(match toks[2] {
                    "R" | "r" => LineColor::Red,
                    "B" | "b" => LineColor::Blue,
                    other => return Err(Error::Parse(format!("bad color {other:?}"))),
                });
            }
        }
        if lines.len() != n {
            return Err(Error::Parse(format!(
                "header says {n} lines, found {}",
                lines.len()
            )));
        }
        let colors = if colors.is_empty() {
            None
        } else if colors.len() == n {
            Some(colors)
        } else {
            return Err(Error::Parse("colors must be given for all lines or none".into()));
        };
        Ok(LineSet { lines, colors })
    }
}

/// Converts a user line set to a wiring diagram, with the per-wire colors
/// when the set is colored. Uses exact rational arithmetic when every
/// coefficient is rational, f64 with tolerance otherwise.
pub fn lines_to_wiring(ls: &LineSet) -> Result<(WiringDiagram, Option<Vec<LineColor>>)> {
    let all_rational = ls
        .lines
        .iter()
        .all(|(s, t)| matches!(s, Coef::Rational(_)) && matches!(t, Coef::Rational(_)));
    let (diagram, wires) = if all_rational {
        let glines: Vec<GLine<BigRational>> = ls
            .lines
            .iter()
            .map(|(s, t)| GLine {
                a: -s.as_rational().unwrap(),
                b: BigRational::from_integer(BigInt::from(1)),
                c: t.as_rational().unwrap(),
            })
            .collect();
        sweep_to_wiring(&glines)?
    } else {
        let glines: Vec<GLine<EpsF64>> = ls
            .lines
            .iter()
            .map(|(s, t)| GLine {
                a: EpsF64(-s.as_f64()),
                b: EpsF64(1.0),
                c: EpsF64(t.as_f64()),
            })
            .collect();
        sweep_to_wiring(&glines)?
    };
    let colors = ls
        .colors
        .as_ref()
        .map(|cs| wires.iter().map(|&l| cs[l]).collect());
    Ok((diagram, colors))
}

// ---------------------------------------------------------------------
// regular polygon extension (the red sub-arrangement)
// ---------------------------------------------------------------------

/// The extension of the sides of a regular `k`-gon (`k` odd), rotated by
/// half an angular unit so no line is vertical, with the `k` auxiliary
/// vertex-to-opposite-midpoint lines ("dotted" lines, not arrangement
/// members). Exact cyclotomic coordinates; circumradius 1.
#[derive(Clone)]
pub struct PolygonExtension {
    pub k: usize,
    pub field: Rc<CycloField>,
    pub sides: Vec<GLine<CycEl>>,
    pub axes: Vec<GLine<CycEl>>,
    pub inradius: CycEl,
}

/// Angular unit: all directions are multiples of `pi/(2k)`, i.e. of
/// `2*pi/m` with `m = 4k`.
pub fn gen_polygon_extension(k: usize) -> Result<PolygonExtension> {
    if k < 3 || k % 2 == 0 {
        return Err(Error::BadParameter(format!(
            "polygon extension needs odd k >= 3, got {k}"
        )));
    }
    let field = CycloField::new(4 * k)?;
    let inradius = field.cos2pi(2); // cos(pi/k)
    let mut sides = Vec::with_capacity(k);
    for j in 0..k {
        // Side normal at angle (4j+1) * pi/(2k).
        let t = (4 * j + 1) as i64;
        sides.push(GLine {
            a: field.cos2pi(t),
            b: field.sin2pi(t),
            c: inradius.clone(),
        });
    }
    let mut axes = Vec::with_capacity(k);
    for j in 0..k {
        // Axis through the origin with direction angle (4j+3) * pi/(2k):
        // normal is the direction rotated by 90 degrees.
        let t = (4 * j + 3) as i64;
        axes.push(GLine {
            a: field.sin2pi(t).neg(),
            b: field.cos2pi(t),
            c: field.zero(),
        });
    }
    Ok(PolygonExtension {
        k,
        field,
        sides,
        axes,
        inradius,
    })
}

impl PolygonExtension {
    /// Checks that no side line is vertical and no two are parallel.
    pub fn check_no_parallels(&self) -> Result<()> {
        check_no_parallels(&self.sides)
    }

    /// Checks that all `C(k,2)` side-side crossings are distinct points.
    pub fn check_crossings_distinct(&self) -> Result<()> {
        check_crossings_distinct(&self.sides)
    }

    /// The incidence at the heart of the construction: every crossing of
    /// two sides lies on one of the `k` auxiliary lines. Exact.
    pub fn check_crossings_on_axes(&self) -> Result<()> {
        for i in 0..self.sides.len() {
            for j in i + 1..self.sides.len() {
                let p = cross_point(&self.sides[i], &self.sides[j])
                    .ok_or(Error::ParallelLines(i, j))?;
                if !self
                    .axes
                    .iter()
                    .any(|axis| side_of_line(axis, &p) == 0)
                {
                    return Err(Error::internal(format!(
                        "crossing of sides {i},{j} lies on no auxiliary line"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Wiring diagram of the side-extension arrangement.
    pub fn to_wiring(&self) -> Result<(WiringDiagram, Vec<usize>, BigRational)> {
        sheared_wiring(&self.sides)
    }
}

fn check_no_parallels<S: GeomScalar>(lines: &[GLine<S>]) -> Result<()> {
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let det = lines[i].a.mul(&lines[j].b).sub(&lines[j].a.mul(&lines[i].b));
            if det.sign() == 0 {
                return Err(Error::ParallelLines(i, j));
            }
        }
    }
    Ok(())
}

fn check_crossings_distinct<S: GeomScalar>(lines: &[GLine<S>]) -> Result<()> {
    let mut points = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let p = cross_point(&lines[i], &lines[j]).ok_or(Error::ParallelLines(i, j))?;
            points.push((i, j, p));
        }
    }
    // Presort by approximate coordinates so that exactly coinciding points
    // become near-neighbors, then verify candidate pairs exactly. Two equal
    // points have equal float keys and land next to each other; the window
    // below is generous so near-ties are also checked exactly.
    let keys: Vec<(f64, f64)> = points
        .iter()
        .map(|(_, _, p)| {
            let w = p.w.approx();
            (p.x.approx() / w, p.y.approx() / w)
        })
        .collect();
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| keys[a].partial_cmp(&keys[b]).unwrap_or(std::cmp::Ordering::Equal));
    for (rank, &s) in order.iter().enumerate() {
        for &t in order.iter().skip(rank + 1) {
            if (keys[t].0 - keys[s].0).abs() > 1e-6 {
                break;
            }
            let (p, q) = (&points[s].2, &points[t].2);
            let dx = p.x.mul(&q.w).sub(&q.x.mul(&p.w));
            let dy = p.y.mul(&q.w).sub(&q.y.mul(&p.w));
            if dx.sign() == 0 && dy.sign() == 0 {
                return Err(Error::CoincidentCrossings(format!(
                    "crossings ({},{}) and ({},{}) coincide",
                    points[s].0, points[s].1, points[t].0, points[t].1
                )));
            }
        }
    }
    Ok(())
}

/// Shears `x -> x + lambda*y` until all crossing x-coordinates are
/// distinct and no line is vertical, then sweeps. The returned wiring
/// describes an arrangement homeomorphic to the input; `lambda` is
/// reported so representative points can be mapped back.
fn sheared_wiring(lines: &[GLine<CycEl>]) -> Result<(WiringDiagram, Vec<usize>, BigRational)> {
    for num in 0..32i64 {
        let lambda = BigRational::new(BigInt::from(num), BigInt::from(97));
        let sheared: Vec<GLine<CycEl>> = lines
            .iter()
            .map(|l| GLine {
                a: l.a.clone(),
                b: l.b.sub(&l.a.scale(&lambda)),
                c: l.c.clone(),
            })
            .collect();
        if sheared.iter().any(|l| l.b.sign() == 0) {
            continue;
        }
        match sweep_to_wiring(&sheared) {
            Ok((d, wires)) => return Ok((d, wires, lambda)),
            Err(Error::CoincidentCrossings(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::PerturbationFailure)
}

// ---------------------------------------------------------------------
// the bicolored extremal instance
// ---------------------------------------------------------------------

/// The bicolored instance: `3k` red lines extending a regular `3k`-gon and
/// `2k` blue lines inserted as `k` almost-parallel twin pairs, each pair
/// confined to two opposite marked slabs (every third of the `6k`
/// unbounded sectors cut out by the auxiliary lines).
#[derive(Clone)]
pub struct BicoloredInstance {
    pub k: usize,
    pub polygon: PolygonExtension,
    /// Twins `2p` and `2p+1` belong to pair `p`.
    pub blue: Vec<GLine<CycEl>>,
    /// Directions of the `6k` sector-boundary rays, counterclockwise;
    /// ray `t` has angle `(2t+1) * pi/(6k)`.
    pub rays: Vec<(CycEl, CycEl)>,
    /// Marked sector indices (every third sector; closed under `t -> t+3k`).
    pub marked: Vec<usize>,
    /// Per twin pair, the two opposite marked sectors hosting it.
    pub twin_sectors: Vec<(usize, usize)>,
    /// Perturbation sizes that passed certification.
    pub delta: BigRational,
    pub tilt: BigRational,
}

pub fn gen_theorem2(k: usize) -> Result<BicoloredInstance> {
    if k % 2 == 0 || k == 0 {
        return Err(Error::BadParameter(format!("theorem-2 instance needs odd k, got {k}")));
    }
    let big_k = 3 * k;
    let polygon = gen_polygon_extension(big_k)?;
    let field = Rc::clone(&polygon.field);

    let rays: Vec<(CycEl, CycEl)> = (0..2 * big_k)
        .map(|t| {
            let a = (2 * t + 1) as i64;
            (field.cos2pi(a), field.sin2pi(a))
        })
        .collect();
    let marked: Vec<usize> = (0..2 * big_k).filter(|t| t % 3 == 0).collect();
    let twin_sectors: Vec<(usize, usize)> = (0..k).map(|p| (3 * p, 3 * p + big_k)).collect();

    // Blue twins: both lines of pair p share (almost) the direction of the
    // bisector of sector 3p, rotated slightly off the bisector so that no
    // blue line is parallel to a red one. The second twin is tilted a bit
    // more so the twins are not mutually parallel. Start with separation
    // inradius/(100 k) and shrink on certification failure.
    let mu = BigRational::new(BigInt::from(1), BigInt::from(8 * big_k as i64));
    let mut delta = BigRational::new(BigInt::from(1), BigInt::from(100 * k as i64));
    let mut tilt = &delta * BigRational::new(BigInt::from(1), BigInt::from(100));
    for _attempt in 0..=5 {
        let mut blue = Vec::with_capacity(2 * k);
        for p in 0..k {
            let t = (6 * p + 2) as i64; // bisector of sector 3p
            let u = (field.cos2pi(t), field.sin2pi(t));
            let perp = (u.1.neg(), u.0.clone());
            // direction of the first twin: bisector rotated by ~mu
            let d0 = (u.0.add(&perp.0.scale(&mu)), u.1.add(&perp.1.scale(&mu)));
            let d1 = (
                d0.0.add(&perp.0.scale(&tilt)),
                d0.1.add(&perp.1.scale(&tilt)),
            );
            // offset base points +-(delta/2) * inradius along the
            // perpendicular of the bisector
            let half = &delta * BigRational::new(BigInt::from(1), BigInt::from(2));
            let off = (
                perp.0.mul(&polygon.inradius).scale(&half),
                perp.1.mul(&polygon.inradius).scale(&half),
            );
            for (dir, sign) in [(&d0, 1i64), (&d1, -1i64)] {
                let px = if sign > 0 { off.0.clone() } else { off.0.neg() };
                let py = if sign > 0 { off.1.clone() } else { off.1.neg() };
                // line through (px,py) with direction dir
                let a = dir.1.clone();
                let b = dir.0.neg();
                let c = a.mul(&px).add(&b.mul(&py));
                blue.push(GLine { a, b, c });
            }
        }
        let instance = BicoloredInstance {
            k,
            polygon: polygon.clone(),
            blue,
            rays: rays.clone(),
            marked: marked.clone(),
            twin_sectors: twin_sectors.clone(),
            delta: delta.clone(),
            tilt: tilt.clone(),
        };
        if instance.certify().is_ok() {
            return Ok(instance);
        }
        delta /= BigRational::from_integer(BigInt::from(10));
        tilt /= BigRational::from_integer(BigInt::from(10));
    }
    Err(Error::PerturbationFailure)
}

impl BicoloredInstance {
    pub fn red(&self) -> &[GLine<CycEl>] {
        &self.polygon.sides
    }

    /// All `3k + 2k` member lines, reds first, with their colors.
    pub fn all_lines(&self) -> (Vec<GLine<CycEl>>, Vec<LineColor>) {
        let mut lines = self.polygon.sides.clone();
        lines.extend(self.blue.iter().cloned());
        let mut colors = vec![LineColor::Red; self.polygon.sides.len()];
        colors.extend(std::iter::repeat(LineColor::Blue).take(self.blue.len()));
        (lines, colors)
    }

    /// Simplicity plus twin confinement, all exact.
    pub fn certify(&self) -> Result<()> {
        let (lines, _) = self.all_lines();
        check_no_parallels(&lines)?;
        check_crossings_distinct(&lines)?;
        self.check_twins_confined()
    }

    /// Each blue line crosses every auxiliary line strictly inside the
    /// polygon and runs to infinity inside its two assigned marked slabs.
    pub fn check_twins_confined(&self) -> Result<()> {
        let field = &self.polygon.field;
        let big = field.from_int(1000);
        for (b, blue) in self.blue.iter().enumerate() {
            let pair = b / 2;
            let (s_pos, s_neg) = self.twin_sectors[pair];
            for (ai, axis) in self.polygon.axes.iter().enumerate() {
                let p = cross_point(blue, axis).ok_or_else(|| {
                    Error::internal(format!("blue {b} parallel to auxiliary line {ai}"))
                })?;
                if !self.strictly_in_polygon(&p) {
                    return Err(Error::internal(format!(
                        "blue {b} crosses auxiliary line {ai} outside the polygon"
                    )));
                }
            }
            // Far points on both ends, in homogeneous form. The direction
            // is (b, -a) for a line ax + by = c; a base point on the line
            // is availability via any axis crossing, so reuse the first.
            let base = cross_point(blue, &self.polygon.axes[0]).unwrap();
            // direction of `ax + by = c` is (-b, a)
            let dir = (blue.b.neg(), blue.a.clone());
            for (sector, sgn) in [(s_pos, 1), (s_neg, -1)] {
                let step = if sgn > 0 {
                    (dir.0.mul(&big), dir.1.mul(&big))
                } else {
                    (dir.0.mul(&big).neg(), dir.1.mul(&big).neg())
                };
                let far = HPoint {
                    x: base.x.add(&step.0.mul(&base.w)),
                    y: base.y.add(&step.1.mul(&base.w)),
                    w: base.w.clone(),
                }
                .normalized();
                if self.strictly_in_polygon(&far) {
                    return Err(Error::internal(format!("far point of blue {b} inside polygon")));
                }
                if self.sector_of(&far) != Some(sector) {
                    return Err(Error::internal(format!(
                        "far point of blue {b} not in its assigned sector {sector}"
                    )));
                }
            }
            // Twin directions must head into opposite sectors; with the
            // +/- offsets above, even twins head into s_pos first.
            let _ = s_neg;
        }
        Ok(())
    }

    pub fn strictly_in_polygon(&self, p: &HPoint<CycEl>) -> bool {
        self.polygon.sides.iter().all(|l| side_of_line(l, p) < 0)
    }

    /// The sector (of the `6k` unbounded cones around the origin) strictly
    /// containing the direction of `p`, if any.
    pub fn sector_of(&self, p: &HPoint<CycEl>) -> Option<usize> {
        let m = self.rays.len();
        for t in 0..m {
            let (r0, r1) = (&self.rays[t], &self.rays[(t + 1) % m]);
            // strictly counterclockwise of ray t and clockwise of ray t+1
            let c0 = r0.0.mul(&p.y).sub(&r0.1.mul(&p.x)).sign();
            let c1 = r1.0.mul(&p.y).sub(&r1.1.mul(&p.x)).sign();
            if c0 > 0 && c1 < 0 {
                return Some(t);
            }
        }
        None
    }

    /// Red lines crossing each sector (outside the polygon); the slab
    /// budget bound asserts at most `(3k-1)/2` per sector.
    ///
    /// Samples one point per cell of the red line\'s subdivision by the
    /// auxiliary lines and the other red lines; cell membership in a slab
    /// is constant, so hitting every cell decides the crossing exactly.
    /// A point on red line `j` counts as inside the polygon when it is
    /// strictly inside every *other* side\'s half-plane.
    pub fn red_lines_per_sector(&self) -> Vec<usize> {
        let sectors = self.rays.len();
        let mut counts = vec![0usize; sectors];
        for (j, red) in self.red().iter().enumerate() {
            // x-coordinates of the crossings with axes and other reds
            let mut xs: Vec<(CycEl, CycEl)> = Vec::new();
            for other in self
                .polygon
                .axes
                .iter()
                .chain(self.red().iter().enumerate().filter(|(i, _)| *i != j).map(|(_, l)| l))
            {
                if let Some(p) = cross_point(red, other) {
                    xs.push((p.x, p.w));
                }
            }
            let sample_xs = sample_abscissae(&xs);
            let mut hit = vec![false; sectors];
            for x in &sample_xs {
                // y on the red line at x: y = (c - a*x)/b
                let ynum = red.c.sub(&red.a.scale(x));
                let yden = red.b.clone();
                let in_gon = self
                    .polygon
                    .sides
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != j)
                    .all(|(_, l)| side_of_line_xr(l, x, &ynum, &yden) < 0);
                if !in_gon {
                    if let Some(t) = self.sector_of_xr(x, &ynum, &yden) {
                        hit[t] = true;
                    }
                }
            }
            for (t, h) in hit.iter().enumerate() {
                if *h {
                    counts[t] += 1;
                }
            }
        }
        counts
    }

    /// Sector of a point given as rational x and field-valued y = ynum/yden.
    /// A float guess selects the candidate cone; only that cone (and on a
    /// miss its neighbors, then all) is verified exactly.
    fn sector_of_xr(&self, x: &BigRational, ynum: &CycEl, yden: &CycEl) -> Option<usize> {
        let m = self.rays.len();
        let flip = yden.sign();
        let cone = |t: usize| -> bool {
            let (r0, r1) = (&self.rays[t], &self.rays[(t + 1) % m]);
            let c0 = r0.0.mul(ynum).sub(&r0.1.scale(x).mul(yden)).sign() * flip;
            let c1 = r1.0.mul(ynum).sub(&r1.1.scale(x).mul(yden)).sign() * flip;
            c0 > 0 && c1 < 0
        };
        let xf = x.to_f64().unwrap_or(f64::NAN);
        let yf = ynum.approx() / yden.approx();
        let ang = yf.atan2(xf).rem_euclid(std::f64::consts::TAU);
        // ray t sits at angle (2t+1) * pi / m
        let guess = ((ang * m as f64 / std::f64::consts::TAU - 0.5).floor() as i64)
            .rem_euclid(m as i64) as usize;
        for t in [guess, (guess + m - 1) % m, (guess + 1) % m] {
            if cone(t) {
                return Some(t);
            }
        }
        (0..m).find(|&t| cone(t))
    }


    /// Wiring diagram plus wire colors for the full bicolored arrangement.
    pub fn to_wiring(&self) -> Result<(WiringDiagram, Vec<LineColor>, Vec<usize>, BigRational)> {
        let (lines, colors) = self.all_lines();
        let (diagram, wires, lambda) = sheared_wiring(&lines)?;
        let wire_colors = wires.iter().map(|&l| colors[l]).collect();
        Ok((diagram, wire_colors, wires, lambda))
    }
}

// ---------------------------------------------------------------------
// face classification of the converted instance
// ---------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FaceClass {
    /// Inside the original polygon.
    Middle,
    /// In the marked slab with this sector index.
    Marked(usize),
    Other,
}

/// The instance together with its wiring diagram, plane graph, and
/// geometric face classification. This is the object the structure tests
/// and the alternating-path oracle run against.
pub struct Thm2Workbench {
    pub instance: BicoloredInstance,
    pub diagram: WiringDiagram,
    /// Per-wire colors (pseudoline ids of the plane graph).
    pub colors: Vec<LineColor>,
    pub plane: crate::plane::PlaneGraph,
    pub face_class: Vec<FaceClass>,
    /// Red lines separating each face from the polygon center.
    pub face_red_depth: Vec<usize>,
    /// Distance from the polygon within a face's marked slab: the number
    /// of separating red lines that cross the slab transversally. The red
    /// line running out through a slab lengthwise (one per slab) measures
    /// sideways movement, not progression, and is excluded.
    pub face_slab_distance: Vec<usize>,
}

impl BicoloredInstance {
    pub fn workbench(&self) -> Result<Thm2Workbench> {
        let (diagram, colors, wires, lambda) = self.to_wiring()?;
        let plane = crate::plane::PlaneGraph::build(&diagram)?;
        let (lines, _) = self.all_lines();
        // Sheared copies of the member lines, in wire order, used to place
        // representative points inside faces of the sweep.
        let sheared: Vec<GLine<CycEl>> = wires
            .iter()
            .map(|&l| GLine {
                a: lines[l].a.clone(),
                b: lines[l].b.sub(&lines[l].a.scale(&lambda)),
                c: lines[l].c.clone(),
            })
            .collect();
        // Crossing x-coordinates in sweep order.
        let mut xs: Vec<(CycEl, CycEl)> = Vec::with_capacity(plane.vertices.len());
        for v in &plane.vertices {
            let (i, j) = v.lines;
            let p = cross_point(&sheared[i], &sheared[j]).ok_or_else(|| {
                Error::internal("parallel member lines after shear".to_string())
            })?;
            xs.push((p.x, p.w));
        }
        // Reds whose direction points into a sector are radial for that
        // sector (and its opposite); all other crossing reds are
        // transversal and measure distance from the polygon.
        let radial: Vec<Vec<bool>> = {
            let mut radial = vec![vec![false; self.red().len()]; self.rays.len()];
            for (j, red) in self.red().iter().enumerate() {
                let dir = (red.b.neg(), red.a.clone());
                let m = self.rays.len();
                for t in 0..m {
                    let (r0, r1) = (&self.rays[t], &self.rays[(t + 1) % m]);
                    for d in [(dir.0.clone(), dir.1.clone()), (dir.0.neg(), dir.1.neg())] {
                        let c0 = r0.0.mul(&d.1).sub(&r0.1.mul(&d.0)).sign();
                        let c1 = r1.0.mul(&d.1).sub(&r1.1.mul(&d.0)).sign();
                        if c0 > 0 && c1 < 0 {
                            radial[t][j] = true;
                        }
                    }
                }
            }
            radial
        };
        let mut face_class = Vec::with_capacity(plane.faces.len());
        let mut face_red_depth = Vec::with_capacity(plane.faces.len());
        let mut face_slab_distance = Vec::with_capacity(plane.faces.len());
        for f in 0..plane.faces.len() {
            let (rx, ry) = face_rep_point(&plane, &sheared, &xs, f, &lambda)
                .ok_or_else(|| Error::internal(format!("no representative point for face {f}")))?;
            // Classify against the unsheared construction; a point exactly
            // on an auxiliary line would be ambiguous, so nudge by retrying
            // the face with a different abscissa ordering is unnecessary:
            // the rep point is strictly interior to the face, and auxiliary
            // lines may legitimately pass through a face. Classification
            // uses the representative point as the face's witness.
            let class = if self.strictly_in_polygon_rat(&rx, &ry) {
                FaceClass::Middle
            } else {
                match self.sector_of_rat(&rx, &ry) {
                    Some(t) if self.marked.contains(&t) => FaceClass::Marked(t),
                    _ => FaceClass::Other,
                }
            };
            face_class.push(class);
            let separating: Vec<bool> = self
                .red()
                .iter()
                .map(|l| side_of_line_rat(l, &rx, &ry) > 0)
                .collect();
            face_red_depth.push(separating.iter().filter(|&&s| s).count());
            let slab_distance = match class {
                FaceClass::Marked(t) => separating
                    .iter()
                    .enumerate()
                    .filter(|&(j, &s)| s && !radial[t][j])
                    .count(),
                _ => 0,
            };
            face_slab_distance.push(slab_distance);
        }
        Ok(Thm2Workbench {
            instance: self.clone(),
            diagram,
            colors,
            plane,
            face_class,
            face_red_depth,
            face_slab_distance,
        })
    }

    pub fn strictly_in_polygon_rat(&self, x: &BigRational, y: &BigRational) -> bool {
        self.polygon
            .sides
            .iter()
            .all(|l| side_of_line_rat(l, x, y) < 0)
    }

    pub fn sector_of_rat(&self, x: &BigRational, y: &BigRational) -> Option<usize> {
        let m = self.rays.len();
        for t in 0..m {
            let (r0, r1) = (&self.rays[t], &self.rays[(t + 1) % m]);
            let c0 = r0.0.scale(y).sub(&r0.1.scale(x)).sign();
            let c1 = r1.0.scale(y).sub(&r1.1.scale(x)).sign();
            if c0 > 0 && c1 < 0 {
                return Some(t);
            }
        }
        None
    }
}

/// Sign of `a*x + b*y - c` at a rational point (scalar operations only).
pub fn side_of_line_rat(l: &GLine<CycEl>, x: &BigRational, y: &BigRational) -> i8 {
    l.a.scale(x).add(&l.b.scale(y)).sub(&l.c).sign()
}

/// Sign of `a*x + b*y - c` at `(x, ynum/yden)` with rational `x`.
fn side_of_line_xr(l: &GLine<CycEl>, x: &BigRational, ynum: &CycEl, yden: &CycEl) -> i8 {
    l.a.scale(x).sub(&l.c).mul(yden).add(&l.b.mul(ynum)).sign() * yden.sign()
}

/// Rational abscissae hitting every open interval between consecutive
/// values of `xs` (given as field-valued fractions), plus one beyond each
/// end. Approximate placement, exactness restored by verifying strict
/// betweenness.
fn sample_abscissae(xs: &[(CycEl, CycEl)]) -> Vec<BigRational> {
    let mut vals: Vec<f64> = xs
        .iter()
        .map(|(n, d)| n.approx() / d.approx())
        .collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    vals.dedup();
    let mut out = Vec::new();
    if vals.is_empty() {
        out.push(BigRational::zero());
        return out;
    }
    let lo = rational_below(xs, vals[0] - 1.0);
    out.push(lo);
    for w in vals.windows(2) {
        if let Some(q) = rational_between_approx(xs, w[0], w[1]) {
            out.push(q);
        }
    }
    out.push(rational_above(xs, vals[vals.len() - 1] + 1.0));
    out
}

/// A rational strictly below every value in `xs`, starting from `guess`.
fn rational_below(xs: &[(CycEl, CycEl)], guess: f64) -> BigRational {
    let mut q = approx_rational(guess);
    loop {
        if xs.iter().all(|(n, d)| cmp_rat_to_frac(&q, n, d) < 0) {
            return q;
        }
        q -= BigRational::from_integer(BigInt::from(1));
    }
}

fn rational_above(xs: &[(CycEl, CycEl)], guess: f64) -> BigRational {
    let mut q = approx_rational(guess);
    loop {
        if xs.iter().all(|(n, d)| cmp_rat_to_frac(&q, n, d) > 0) {
            return q;
        }
        q += BigRational::from_integer(BigInt::from(1));
    }
}

/// A rational strictly between the two field values closest to the open
/// interval `(a, b)` (approximations); verified exactly against all of
/// `xs`, so the returned abscissa lies strictly between the true interval
/// endpoints and off every value.
fn rational_between_approx(xs: &[(CycEl, CycEl)], a: f64, b: f64) -> Option<BigRational> {
    for p in [24u32, 48, 80, 120] {
        let q = approx_rational_p((a + b) / 2.0, p);
        let strictly_off = xs.iter().all(|(n, d)| cmp_rat_to_frac(&q, n, d) != 0);
        if !strictly_off {
            continue;
        }
        // count how many xs lie strictly below q; must split a and b
        let below = xs
            .iter()
            .filter(|(n, d)| cmp_rat_to_frac(&q, n, d) > 0)
            .count();
        let below_a = xs
            .iter()
            .filter(|(n, d)| (n.approx() / d.approx()) <= a + 1e-300)
            .count();
        if below == below_a {
            return Some(q);
        }
    }
    None
}

/// Sign of `q - n/d` (d may have either sign).
fn cmp_rat_to_frac(q: &BigRational, n: &CycEl, d: &CycEl) -> i8 {
    d.scale(q).sub(n).sign() * d.sign()
}

fn approx_rational(v: f64) -> BigRational {
    approx_rational_p(v, 24)
}

fn approx_rational_p(v: f64, bits: u32) -> BigRational {
    let scale = 2f64.powi(bits as i32);
    let num = (v * scale).round();
    BigRational::new(
        BigInt::from(num as i128),
        BigInt::from(2i128.pow(bits)),
    )
}

/// A rational point strictly inside face `f` of the sheared sweep, mapped
/// back through the shear. Verified exactly against the face's
/// above/below pattern, so a wrong float ordering can only cause a retry,
/// never a misplaced point.
fn face_rep_point(
    plane: &crate::plane::PlaneGraph,
    sheared: &[GLine<CycEl>],
    xs: &[(CycEl, CycEl)],
    f: usize,
    lambda: &BigRational,
) -> Option<(BigRational, BigRational)> {
    let (open, close) = plane.face_span(f);
    let level = plane.faces[f].level;
    let face = &plane.faces[f];
    for attempt in 0..6i64 {
        let x = if open >= 0 && (close as usize) < xs.len() {
            let (lo, hi) = (&xs[open as usize], &xs[close as usize]);
            let (a, b) = (lo.0.approx() / lo.1.approx(), hi.0.approx() / hi.1.approx());
            let frac = (1 + attempt * 2) as f64 / (2 + attempt * 2) as f64;
            let target = a + (b - a) * (1.0 - frac) + (b - a) * frac * 0.5;
            let q = find_between(lo, hi, target)?;
            q
        } else if open >= 0 {
            let p = &xs[open as usize];
            rational_above(std::slice::from_ref(p), p.0.approx() / p.1.approx() + attempt as f64 + 1.0)
        } else if (close as usize) < xs.len() {
            let p = &xs[close as usize];
            rational_below(std::slice::from_ref(p), p.0.approx() / p.1.approx() - attempt as f64 - 1.0)
        } else {
            BigRational::from_integer(BigInt::from(attempt))
        };
        // y-values of every wire line at x, approximate ordering
        let ys: Vec<(CycEl, CycEl)> = sheared
            .iter()
            .map(|l| {
                let mut num = l.c.sub(&l.a.scale(&x));
                let mut den = l.b.clone();
                if den.sign() < 0 {
                    num = num.neg();
                    den = den.neg();
                }
                (num, den)
            })
            .collect();
        let mut order: Vec<usize> = (0..ys.len()).collect();
        order.sort_by(|&i, &j| {
            let vi = ys[i].0.approx() / ys[i].1.approx();
            let vj = ys[j].0.approx() / ys[j].1.approx();
            vi.partial_cmp(&vj).unwrap_or(std::cmp::Ordering::Equal)
        });
        let y = if level == 0 {
            let lo = &ys[order[0]];
            rational_below(std::slice::from_ref(lo), lo.0.approx() / lo.1.approx() - 1.0)
        } else if level == ys.len() {
            let hi = &ys[order[ys.len() - 1]];
            rational_above(std::slice::from_ref(hi), hi.0.approx() / hi.1.approx() + 1.0)
        } else {
            let (lo, hi) = (&ys[order[level - 1]], &ys[order[level]]);
            let a = lo.0.approx() / lo.1.approx();
            let b = hi.0.approx() / hi.1.approx();
            match find_between(lo, hi, (a + b) / 2.0) {
                Some(q) => q,
                None => continue,
            }
        };
        // Exact verification: the point must be above exactly the lines
        // below the face.
        let ok = sheared.iter().enumerate().all(|(w, l)| {
            let above = side_of_line_rat_generic(l, &x, &y) * l.b.sign();
            (above > 0) == face.below_lines.contains(w)
        });
        if !ok {
            continue;
        }
        // map back through the shear: original x = X - lambda * Y
        let rx = &x - lambda * &y;
        return Some((rx, y));
    }
    None
}

fn side_of_line_rat_generic(l: &GLine<CycEl>, x: &BigRational, y: &BigRational) -> i8 {
    l.a.scale(x).add(&l.b.scale(y)).sub(&l.c).sign()
}

/// A rational strictly between two field-valued fractions (lo < hi).
fn find_between(lo: &(CycEl, CycEl), hi: &(CycEl, CycEl), target: f64) -> Option<BigRational> {
    for p in [24u32, 48, 80, 120, 160] {
        let q = approx_rational_p(target, p);
        if cmp_rat_to_frac(&q, &lo.0, &lo.1) > 0 && cmp_rat_to_frac(&q, &hi.0, &hi.1) < 0 {
            return Some(q);
        }
        // refine toward the exact midpoint using bisection on rationals
        let lo_f = lo.0.approx() / lo.1.approx();
        let hi_f = hi.0.approx() / hi.1.approx();
        let _ = (lo_f, hi_f);
    }
    // Exact bisection fallback: start from rational brackets and halve.
    let mut a = rational_below(std::slice::from_ref(lo), lo.0.approx() / lo.1.approx() - 1.0);
    let mut b = rational_above(std::slice::from_ref(hi), hi.0.approx() / hi.1.approx() + 1.0);
    for _ in 0..300 {
        let mid = (&a + &b) / BigRational::from_integer(BigInt::from(2));
        let above_lo = cmp_rat_to_frac(&mid, &lo.0, &lo.1) > 0;
        let below_hi = cmp_rat_to_frac(&mid, &hi.0, &hi.1) < 0;
        match (above_lo, below_hi) {
            (true, true) => return Some(mid),
            (false, _) => a = mid,
            (true, false) => b = mid,
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rational_line(slope: i64, intercept: i64) -> (Coef, Coef) {
        (
            Coef::Rational(BigRational::from_integer(BigInt::from(slope))),
            Coef::Rational(BigRational::from_integer(BigInt::from(intercept))),
        )
    }

    #[test]
    fn two_crossing_lines() {
        let ls = LineSet {
            lines: vec![rational_line(1, 0), rational_line(-1, 0)],
            colors: None,
        };
        let (d, _) = lines_to_wiring(&ls).unwrap();
        assert_eq!(d.n(), 2);
        assert_eq!(d.crossings(), &[1]);
    }

    #[test]
    fn three_generic_lines_sorted_by_abscissa() {
        // slopes 2, 0, -1; intercepts 0, 1, 4
        // crossings: (0,1) at x=1/2, (0,2) at x=4/3, (1,2) at x=3
        let ls = LineSet {
            lines: vec![rational_line(2, 0), rational_line(0, 1), rational_line(-1, 4)],
            colors: None,
        };
        let (d, _) = lines_to_wiring(&ls).unwrap();
        assert_eq!(d.crossings().len(), 3);
        // independent oracle: sort the three crossing abscissae by hand;
        // wires bottom-to-top at -inf are lines 0,1,2 (slopes 2,0,-1
        // descending). x=1/2 swaps wires of lines 0,1 (gap 2? they sit at
        // heights 1,2 -> gap 1... recompute: descending slope bottom to
        // top means bottom wire = slope 2). Crossing (0,1) involves
        // heights 1,2 -> gap 1; then (0,2) heights 2,3 -> gap 2; then
        // (1,2) heights 1,2 -> gap 1.
        assert_eq!(d.crossings(), &[1, 2, 1]);
    }

    #[test]
    fn four_generic_lines_counts() {
        let ls = LineSet {
            lines: vec![
                rational_line(3, 0),
                rational_line(1, 1),
                rational_line(-1, 3),
                rational_line(-3, 9),
            ],
            colors: None,
        };
        let (d, _) = lines_to_wiring(&ls).unwrap();
        let g = crate::plane::PlaneGraph::build(&d).unwrap();
        assert_eq!(g.vertices.len(), 6);
        assert_eq!(g.edges.len(), 16);
        assert_eq!(g.faces.len(), 11);
        assert_eq!(g.unbounded_faces().count(), 8);
    }

    #[test]
    fn parallel_lines_rejected() {
        let ls = LineSet {
            lines: vec![rational_line(1, 0), rational_line(1, 2)],
            colors: None,
        };
        assert!(matches!(
            lines_to_wiring(&ls).unwrap_err(),
            Error::ParallelLines(0, 1)
        ));
    }

    #[test]
    fn coincident_crossings_rejected() {
        // three concurrent lines through the origin
        let ls = LineSet {
            lines: vec![rational_line(1, 0), rational_line(-1, 0), rational_line(2, 0)],
            colors: None,
        };
        assert!(matches!(
            lines_to_wiring(&ls).unwrap_err(),
            Error::CoincidentCrossings(_)
        ));
    }

    #[test]
    fn triangle_extension() {
        let p = gen_polygon_extension(3).unwrap();
        p.check_no_parallels().unwrap();
        p.check_crossings_distinct().unwrap();
        p.check_crossings_on_axes().unwrap();
        let (d, _, _) = p.to_wiring().unwrap();
        assert_eq!(d.n(), 3);
        assert_eq!(d.crossings().len(), 3);
    }

    #[test]
    fn pentagon_extension_has_ten_distinct_crossings() {
        let p = gen_polygon_extension(5).unwrap();
        p.check_crossings_distinct().unwrap();
        let (d, _, _) = p.to_wiring().unwrap();
        assert_eq!(d.crossings().len(), 10);
    }

    #[test]
    fn line_set_parsing() {
        let text = "# demo\nlines 2\n1/2 3 R\n-2 0/1 B\n";
        let ls = LineSet::parse(text).unwrap();
        assert_eq!(ls.lines.len(), 2);
        assert_eq!(ls.colors.as_ref().unwrap().len(), 2);
    }
}
