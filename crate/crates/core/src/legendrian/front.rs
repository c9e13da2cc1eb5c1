//! Front projections of Legendrian knots in S³ as left-to-right event sweeps.
//!
//! Positions are counted from the bottom of the sweep line. `LC i` opens two
//! strands at positions `i, i+1`; `RCu i`/`RCd i` closes the strands at `i, i+1`
//! with the stated traversal direction; `X± i` swaps the strands at `i, i+1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{LegendrianData, LegendrianError, ZigZag};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CuspDir {
    Up,
    Down,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FrontEvent {
    LeftCusp(usize),
    RightCusp(usize, CuspDir),
    /// `true` for a positive crossing.
    Crossing(usize, bool),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FrontDiagram {
    events: Vec<FrontEvent>,
}

/// Result of sweeping a front with an orientation fixed at one right cusp.
struct Sweep {
    /// Traversal direction actually realised at each event (cusps) or the
    /// realised sign (crossings), in event order.
    labels: Vec<FrontEvent>,
    tb: i64,
    r: i64,
}

impl FrontDiagram {
    pub fn new(events: Vec<FrontEvent>) -> Result<Self, LegendrianError> {
        let f = FrontDiagram { events };
        let sweep = f.sweep(f.anchor()?, 0)?;
        if sweep.labels != f.events {
            let (i, _) = sweep
                .labels
                .iter()
                .zip(&f.events)
                .enumerate()
                .find(|(_, (a, b))| a != b)
                .expect("labels differ somewhere");
            return Err(LegendrianError::InconsistentFront(format!(
                "event {} ({}) disagrees with the orientation fixed by the first right cusp; expected {}",
                i + 1,
                Token(f.events[i]),
                Token(sweep.labels[i])
            )));
        }
        Ok(f)
    }

    pub fn events(&self) -> &[FrontEvent] {
        &self.events
    }

    /// The standard unknot: one left and one right cusp.
    pub fn unknot() -> Self {
        FrontDiagram { events: vec![FrontEvent::LeftCusp(0), FrontEvent::RightCusp(0, CuspDir::Down)] }
    }

    /// Right-handed trefoil with (tb, r) = (1, 0).
    pub fn trefoil() -> Self {
        use FrontEvent::*;
        FrontDiagram {
            events: vec![
                LeftCusp(0),
                LeftCusp(2),
                Crossing(1, true),
                Crossing(1, true),
                Crossing(1, true),
                RightCusp(0, CuspDir::Down),
                RightCusp(0, CuspDir::Up),
            ],
        }
    }

    pub fn invariants(&self) -> Result<LegendrianData, LegendrianError> {
        let s = self.sweep(self.anchor()?, 0)?;
        Ok(LegendrianData { tb: s.tb, r: s.r })
    }

    /// Same computation with the base point of the closed curve moved to the
    /// `start`-th cusp met along the knot; the answer must not depend on it.
    pub fn invariants_from(&self, start: usize) -> Result<LegendrianData, LegendrianError> {
        let s = self.sweep(self.anchor()?, start)?;
        Ok(LegendrianData { tb: s.tb, r: s.r })
    }

    /// Number of cusps.
    pub fn cusp_count(&self) -> usize {
        self.events.iter().filter(|e| !matches!(e, FrontEvent::Crossing(..))).count()
    }

    /// Inserts a stabilisation next to the first left cusp, choosing the side
    /// that shifts the rotation number in the requested direction.
    pub fn stabilize(&self, dir: ZigZag) -> Result<FrontDiagram, LegendrianError> {
        let before = self.invariants()?;
        let want_r = before.r + dir.rotation_shift();
        let anchor = self.anchor()?;
        let (at, pos) = self
            .events
            .iter()
            .enumerate()
            .find_map(|(k, e)| match e {
                FrontEvent::LeftCusp(p) => Some((k, *p)),
                _ => None,
            })
            .ok_or_else(|| LegendrianError::OpenFront("no left cusp".into()))?;
        let placements = [
            [FrontEvent::LeftCusp(pos + 1), FrontEvent::RightCusp(pos + 2, CuspDir::Down)],
            [FrontEvent::LeftCusp(pos), FrontEvent::RightCusp(pos + 1, CuspDir::Down)],
        ];
        for insert in placements {
            let mut events = self.events.clone();
            events.splice(at + 1..at + 1, insert);
            let shifted_anchor = if anchor > at { anchor + 2 } else { anchor };
            let candidate = FrontDiagram { events };
            let sweep = candidate.sweep(shifted_anchor, 0)?;
            if sweep.r == want_r {
                debug_assert_eq!(sweep.tb, before.tb - 1);
                return Ok(FrontDiagram { events: sweep.labels });
            }
        }
        unreachable!("the two stabilisation sides shift r in opposite directions")
    }

    fn anchor(&self) -> Result<usize, LegendrianError> {
        self.events
            .iter()
            .position(|e| matches!(e, FrontEvent::RightCusp(..)))
            .ok_or_else(|| LegendrianError::OpenFront("no right cusp".into()))
    }

    /// Sweeps the front, orienting the knot by the declared direction of the
    /// right cusp at event index `anchor`.
    fn sweep(&self, anchor: usize, start: usize) -> Result<Sweep, LegendrianError> {
        // strands are arcs between cusps; crossings only permute positions
        let mut line: Vec<usize> = Vec::new();
        let mut strand_count = 0usize;
        // (event index, lower strand, upper strand) for every cusp
        let mut cusps: Vec<(usize, usize, usize)> = Vec::new();
        let mut crossings: Vec<(usize, usize, usize)> = Vec::new();

        for (k, ev) in self.events.iter().enumerate() {
            match *ev {
                FrontEvent::LeftCusp(p) => {
                    if p > line.len() {
                        return Err(bad_index(k, p, line.len()));
                    }
                    let (lo, hi) = (strand_count, strand_count + 1);
                    strand_count += 2;
                    line.splice(p..p, [lo, hi]);
                    cusps.push((k, lo, hi));
                }
                FrontEvent::RightCusp(p, _) => {
                    if p + 1 >= line.len() {
                        return Err(bad_index(k, p, line.len()));
                    }
                    let lo = line.remove(p);
                    let hi = line.remove(p);
                    cusps.push((k, lo, hi));
                }
                FrontEvent::Crossing(p, _) => {
                    if p + 1 >= line.len() {
                        return Err(bad_index(k, p, line.len()));
                    }
                    crossings.push((k, line[p], line[p + 1]));
                    line.swap(p, p + 1);
                }
            }
        }
        if !line.is_empty() {
            return Err(LegendrianError::OpenFront(format!("{} strands never close", line.len())));
        }
        if strand_count == 0 {
            return Err(LegendrianError::OpenFront("empty front".into()));
        }

        // each strand meets exactly two cusps; walk the cycle
        let mut ends: Vec<Vec<usize>> = vec![Vec::new(); strand_count];
        for (ci, &(_, lo, hi)) in cusps.iter().enumerate() {
            ends[lo].push(ci);
            ends[hi].push(ci);
        }
        let start = start % cusps.len();
        let mut order = vec![start];
        let (_, lo0, _) = cusps[start];
        let mut strand = lo0;
        let mut at = start;
        loop {
            let next = if ends[strand][0] == at { ends[strand][1] } else { ends[strand][0] };
            if next == start {
                break;
            }
            order.push(next);
            let (_, lo, hi) = cusps[next];
            strand = if lo == strand { hi } else { lo };
            at = next;
        }
        if order.len() != cusps.len() {
            return Err(LegendrianError::MultiComponent(cusps.len() - order.len()));
        }

        // strand directions: +1 rightward, −1 leftward
        let mut dir = vec![0i64; strand_count];
        let anchor_cusp = cusps.iter().position(|&(k, _, _)| k == anchor).expect("anchor is a cusp");
        let FrontEvent::RightCusp(_, anchor_dir) = self.events[anchor] else {
            unreachable!("anchor is a right cusp")
        };
        let (_, alo, ahi) = cusps[anchor_cusp];
        // a downward right cusp is entered along its upper strand
        let upper_right = if anchor_dir == CuspDir::Down { 1 } else { -1 };
        dir[ahi] = upper_right;
        dir[alo] = -upper_right;
        // every cusp reverses the horizontal direction; propagate around the cycle
        let pos = order.iter().position(|&c| c == anchor_cusp).expect("anchor on cycle");
        for step in 1..order.len() {
            let c = order[(pos + step) % order.len()];
            let (_, lo, hi) = cusps[c];
            match (dir[lo], dir[hi]) {
                (0, 0) => unreachable!("cycle walk reaches a cusp through a known strand"),
                (d, 0) => dir[hi] = -d,
                (0, d) => dir[lo] = -d,
                _ => {}
            }
        }

        let mut labels = self.events.clone();
        let (mut up, mut down) = (0i64, 0i64);
        let mut right_cusps = 0i64;
        for &(k, _, hi) in &cusps {
            let d = match self.events[k] {
                FrontEvent::LeftCusp(_) => {
                    // entering along the upper strand means moving downward
                    if dir[hi] < 0 { CuspDir::Down } else { CuspDir::Up }
                }
                FrontEvent::RightCusp(p, _) => {
                    right_cusps += 1;
                    let d = if dir[hi] > 0 { CuspDir::Down } else { CuspDir::Up };
                    labels[k] = FrontEvent::RightCusp(p, d);
                    d
                }
                FrontEvent::Crossing(..) => unreachable!(),
            };
            match d {
                CuspDir::Up => up += 1,
                CuspDir::Down => down += 1,
            }
        }
        let mut writhe = 0i64;
        for &(k, a, b) in &crossings {
            let positive = dir[a] == dir[b];
            writhe += if positive { 1 } else { -1 };
            if let FrontEvent::Crossing(p, _) = self.events[k] {
                labels[k] = FrontEvent::Crossing(p, positive);
            }
        }
        Ok(Sweep { labels, tb: writhe - right_cusps, r: (down - up) / 2 })
    }
}

fn bad_index(event: usize, pos: usize, width: usize) -> LegendrianError {
    LegendrianError::OpenFront(format!(
        "event {} uses position {pos} but only {width} strands are present",
        event + 1
    ))
}

struct Token(FrontEvent);

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            FrontEvent::LeftCusp(p) => write!(f, "LC {p}"),
            FrontEvent::RightCusp(p, CuspDir::Up) => write!(f, "RCu {p}"),
            FrontEvent::RightCusp(p, CuspDir::Down) => write!(f, "RCd {p}"),
            FrontEvent::Crossing(p, true) => write!(f, "X+ {p}"),
            FrontEvent::Crossing(p, false) => write!(f, "X- {p}"),
        }
    }
}

impl fmt::Display for FrontDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.events.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", Token(*e))?;
        }
        Ok(())
    }
}

impl FromStr for FrontDiagram {
    type Err = LegendrianError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut events = Vec::new();
        for (n, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let tok = parts.next().unwrap_or_default();
            let pos: usize = parts
                .next()
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| LegendrianError::Parse(format!("line {}: missing strand index", n + 1)))?;
            if parts.next().is_some() {
                return Err(LegendrianError::Parse(format!("line {}: trailing input", n + 1)));
            }
            events.push(match tok {
                "LC" => FrontEvent::LeftCusp(pos),
                "RCu" => FrontEvent::RightCusp(pos, CuspDir::Up),
                "RCd" => FrontEvent::RightCusp(pos, CuspDir::Down),
                "X+" => FrontEvent::Crossing(pos, true),
                "X-" => FrontEvent::Crossing(pos, false),
                other => {
                    return Err(LegendrianError::Parse(format!("line {}: unknown token {other:?}", n + 1)))
                }
            });
        }
        FrontDiagram::new(events)
    }
}

impl Serialize for FrontDiagram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FrontDiagram {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(tb: i64, r: i64) -> LegendrianData {
        LegendrianData { tb, r }
    }

    #[test]
    fn standard_unknot_and_trefoil() {
        assert_eq!(FrontDiagram::unknot().invariants().unwrap(), data(-1, 0));
        assert_eq!(FrontDiagram::trefoil().invariants().unwrap(), data(1, 0));
        // the built-in fronts pass validation
        FrontDiagram::new(FrontDiagram::trefoil().events).unwrap();
    }

    #[test]
    fn dsl_round_trip() {
        let text = FrontDiagram::trefoil().to_string();
        assert_eq!(text, "LC 0\nLC 2\nX+ 1\nX+ 1\nX+ 1\nRCd 0\nRCu 0");
        assert_eq!(text.parse::<FrontDiagram>().unwrap(), FrontDiagram::trefoil());
    }

    #[test]
    fn hand_built_zigzag() {
        // unknot with a stabilisation on the upper strand: 2 right cusps
        let f: FrontDiagram = "LC 0\nLC 1\nRCd 2\nRCd 0".parse().unwrap();
        let d = f.invariants().unwrap();
        assert_eq!(d.tb, -2);
        assert_eq!(d.r.abs(), 1);
    }

    #[test]
    fn inconsistent_labels_rejected() {
        let err = "LC 0\nLC 2\nX+ 1\nX- 1\nX+ 1\nRCd 0\nRCu 0".parse::<FrontDiagram>().unwrap_err();
        assert!(matches!(err, LegendrianError::InconsistentFront(_)));
        let err = "LC 0\nLC 2\nX+ 1\nX+ 1\nX+ 1\nRCd 0\nRCd 0".parse::<FrontDiagram>().unwrap_err();
        assert!(matches!(err, LegendrianError::InconsistentFront(_)));
    }

    #[test]
    fn open_and_split_fronts() {
        assert!(matches!("LC 0".parse::<FrontDiagram>(), Err(LegendrianError::OpenFront(_))));
        assert!(matches!("LC 0\nRCd 1".parse::<FrontDiagram>(), Err(LegendrianError::OpenFront(_))));
        assert!(matches!(
            "LC 0\nLC 2\nRCd 2\nRCd 0".parse::<FrontDiagram>(),
            Err(LegendrianError::MultiComponent(_))
        ));
        assert!(matches!("LC 0\nRCx 0".parse::<FrontDiagram>(), Err(LegendrianError::Parse(_))));
    }

    #[test]
    fn stabilize_moves_invariants() {
        let u = FrontDiagram::unknot();
        let down = u.stabilize(ZigZag::Down).unwrap();
        assert_eq!(down.invariants().unwrap(), data(-2, -1));
        let up = u.stabilize(ZigZag::Up).unwrap();
        assert_eq!(up.invariants().unwrap(), data(-2, 1));
        let t = FrontDiagram::trefoil().stabilize(ZigZag::Up).unwrap().stabilize(ZigZag::Up).unwrap();
        assert_eq!(t.invariants().unwrap(), data(-1, 2));
        // stabilised fronts re-parse with their own labels
        assert_eq!(t.to_string().parse::<FrontDiagram>().unwrap(), t);
    }

    #[test]
    fn base_point_independence() {
        let t = FrontDiagram::trefoil().stabilize(ZigZag::Down).unwrap();
        let want = t.invariants().unwrap();
        for s in 0..t.cusp_count() {
            assert_eq!(t.invariants_from(s).unwrap(), want);
        }
    }
}
