//! Problem instances: the congruential benchmark generator and the plain
//! text instance file format.
//!
//! File layout (UTF-8):
//!
//! ```text
//! box xmin ymin xmax ymax
//! nd no
//! x y w        <- nd demand rows
//! x y          <- no obnoxious rows
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{BoundingBox, Point};

const MULTIPLIER: u64 = 12219;
const MODULUS: u64 = 100_000;
/// Each coordinate stream is drawn this far before the first `n` are kept.
pub const STREAM_LEN: usize = 1000;
pub const X_SEED: u32 = 97;
pub const Y_SEED: u32 = 367;

/// Multiplicative congruential stream `r <- 12219 r mod 100000`, state in (0, 100000).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStream {
    r: u32,
}

impl SeedStream {
    pub fn new(seed: u32) -> Self {
        assert!(seed > 0 && u64::from(seed) < MODULUS, "seed must lie in (0, 100000)");
        SeedStream { r: seed }
    }

    pub fn state(&self) -> u32 {
        self.r
    }

    pub fn next(&mut self) -> u32 {
        let r = (MULTIPLIER * u64::from(self.r)) % MODULUS;
        assert!(r != 0, "congruential stream collapsed to zero");
        self.r = r as u32;
        self.r
    }

    /// The seed followed by the next `len - 1` values.
    pub fn sequence(seed: u32, len: usize) -> Vec<u32> {
        let mut s = SeedStream::new(seed);
        let mut out = Vec::with_capacity(len);
        if len > 0 {
            out.push(seed);
        }
        while out.len() < len {
            out.push(s.next());
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemandPoint {
    pub location: Point,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    demand: Vec<DemandPoint>,
    obnoxious: Vec<Point>,
    bbox: BoundingBox,
}

impl Instance {
    pub fn new(demand: Vec<DemandPoint>, obnoxious: Vec<Point>, bbox: BoundingBox) -> Result<Self> {
        for (i, d) in demand.iter().enumerate() {
            if !d.location.is_finite() || !d.weight.is_finite() {
                return Err(Error::NonFinite);
            }
            if d.weight <= 0.0 {
                return Err(Error::InvalidInstance(format!("demand {i} has non-positive weight {}", d.weight)));
            }
            if !bbox.contains(d.location) {
                return Err(Error::InvalidInstance(format!("demand {i} at {} is outside the box", d.location)));
            }
        }
        for (i, p) in obnoxious.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::NonFinite);
            }
            if !bbox.contains(*p) {
                return Err(Error::InvalidInstance(format!("obnoxious point {i} at {p} is outside the box")));
            }
        }
        Ok(Instance { demand, obnoxious, bbox })
    }

    /// The benchmark instance: the first `n` of 1000 points drawn from the
    /// x-stream (seed 97) and y-stream (seed 367), scaled by 1/10000 into the
    /// 10 x 10 square. Every point is a unit-weight demand point and also an
    /// obnoxious point.
    pub fn generate(n: usize) -> Result<Self> {
        if n == 0 || n > STREAM_LEN {
            return Err(Error::Domain(format!("n must lie in 1..={STREAM_LEN}, got {n}")));
        }
        let xs = SeedStream::sequence(X_SEED, STREAM_LEN);
        let ys = SeedStream::sequence(Y_SEED, STREAM_LEN);
        let points: Vec<Point> = xs
            .iter()
            .zip(&ys)
            .take(n)
            .map(|(&x, &y)| Point::new(f64::from(x) / 10_000.0, f64::from(y) / 10_000.0))
            .collect();
        let demand = points.iter().map(|&location| DemandPoint { location, weight: 1.0 }).collect();
        Instance::new(demand, points, BoundingBox::square10())
    }

    pub fn demand(&self) -> &[DemandPoint] {
        &self.demand
    }

    pub fn obnoxious(&self) -> &[Point] {
        &self.obnoxious
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }

    pub fn demand_points(&self) -> Vec<Point> {
        self.demand.iter().map(|d| d.location).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.demand.iter().map(|d| d.weight).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.demand.iter().map(|d| d.weight).sum()
    }

    /// Copy with every demand weight multiplied by `factor`.
    pub fn scaled_weights(&self, factor: f64) -> Result<Self> {
        let demand = self
            .demand
            .iter()
            .map(|d| DemandPoint { location: d.location, weight: d.weight * factor })
            .collect();
        Instance::new(demand, self.obnoxious.clone(), self.bbox)
    }

    pub fn to_text(&self) -> String {
        let b = &self.bbox;
        let mut s = String::new();
        writeln!(s, "box {} {} {} {}", b.xmin, b.ymin, b.xmax, b.ymax).unwrap();
        writeln!(s, "{} {}", self.demand.len(), self.obnoxious.len()).unwrap();
        for d in &self.demand {
            writeln!(s, "{} {} {}", d.location.x, d.location.y, d.weight).unwrap();
        }
        for p in &self.obnoxious {
            writeln!(s, "{} {}", p.x, p.y).unwrap();
        }
        s
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse { path: path.to_path_buf(), line, msg };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
        let mut numbers = |expect: usize, what: &str| -> Result<(usize, Vec<f64>)> {
            let (no, line) = lines.next().ok_or_else(|| err(0, format!("unexpected end of file, expected {what}")))?;
            let mut fields = line.split_whitespace().peekable();
            if what == "box" && fields.next_if_eq(&"box").is_none() {
                return Err(err(no, "expected `box xmin ymin xmax ymax`".into()));
            }
            let vals = fields
                .map(|f| f.parse::<f64>().map_err(|e| err(no, format!("bad number {f:?}: {e}"))))
                .collect::<Result<Vec<f64>>>()?;
            if vals.len() != expect {
                return Err(err(no, format!("expected {expect} fields for {what}, found {}", vals.len())));
            }
            Ok((no, vals))
        };

        let (box_line, b) = numbers(4, "box")?;
        let bbox = BoundingBox::new(b[0], b[1], b[2], b[3]).map_err(|e| err(box_line, e.to_string()))?;
        let (count_line, counts) = numbers(2, "counts")?;
        let to_count = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(err(count_line, format!("bad count {v}")))
            }
        };
        let (nd, no) = (to_count(counts[0])?, to_count(counts[1])?);

        let mut demand = Vec::with_capacity(nd);
        for _ in 0..nd {
            let (line, v) = numbers(3, "demand row `x y w`")?;
            if v[2] <= 0.0 {
                return Err(err(line, format!("weight must be positive, got {}", v[2])));
            }
            let location = Point::new(v[0], v[1]);
            if !bbox.contains(location) {
                return Err(err(line, format!("demand point {location} is outside the box")));
            }
            demand.push(DemandPoint { location, weight: v[2] });
        }
        let mut obnoxious = Vec::with_capacity(no);
        for _ in 0..no {
            let (line, v) = numbers(2, "obnoxious row `x y`")?;
            let p = Point::new(v[0], v[1]);
            if !bbox.contains(p) {
                return Err(err(line, format!("obnoxious point {p} is outside the box")));
            }
            obnoxious.push(p);
        }
        if let Some((line, _)) = lines.next() {
            return Err(err(line, "trailing data after the declared rows".into()));
        }
        Instance::new(demand, obnoxious, bbox)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Instance::parse(&text, path)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_steps() {
        assert_eq!(SeedStream::new(97).next(), 85243);
        assert_eq!(SeedStream::new(367).next(), 84373);
        assert_eq!(SeedStream::new(85243).next(), 84217);
    }

    #[test]
    fn first_points() {
        let inst = Instance::generate(2).unwrap();
        assert_eq!(inst.demand()[0].location, Point::new(0.0097, 0.0367));
        assert_eq!(inst.demand()[1].location, Point::new(8.5243, 8.4373));
        assert_eq!(inst.obnoxious(), &inst.demand_points()[..]);
        assert!(Instance::generate(0).is_err());
        assert!(Instance::generate(1001).is_err());
    }

    #[test]
    fn streams_never_hit_zero_and_points_are_distinct() {
        let xs = SeedStream::sequence(X_SEED, STREAM_LEN);
        let ys = SeedStream::sequence(Y_SEED, STREAM_LEN);
        assert!(xs.iter().chain(&ys).all(|&r| r > 0 && r < 100_000));
        let mut pairs: Vec<(u32, u32)> = xs.into_iter().zip(ys).collect();
        pairs.sort_unstable();
        pairs.dedup();
        assert_eq!(pairs.len(), STREAM_LEN);
    }

    #[test]
    fn parse_rejects_bad_files() {
        let p = Path::new("mem");
        let zero_weight = "box 0 0 10 10\n1 1\n1 1 0\n1 1\n";
        assert!(matches!(Instance::parse(zero_weight, p), Err(Error::Parse { line: 3, .. })));
        let short = "box 0 0 10 10\n3 0\n1 1 1\n2 2 1\n";
        assert!(matches!(Instance::parse(short, p), Err(Error::Parse { .. })));
        let outside = "box 0 0 10 10\n0 1\n11 1\n";
        assert!(matches!(Instance::parse(outside, p), Err(Error::Parse { line: 3, .. })));
        let garbage = "box 0 0 ten 10\n0 0\n";
        assert!(matches!(Instance::parse(garbage, p), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn disjoint_demand_and_obnoxious_sets() {
        let text = "box 0 0 4 4\n2 1\n1 1 2.5\n3 3 1\n2 2\n";
        let inst = Instance::parse(text, Path::new("mem")).unwrap();
        assert_eq!(inst.demand().len(), 2);
        assert_eq!(inst.obnoxious(), &[Point::new(2.0, 2.0)]);
        assert_eq!(inst.total_weight(), 3.5);
        assert_eq!(Instance::parse(&inst.to_text(), Path::new("mem")).unwrap(), inst);
    }
}
