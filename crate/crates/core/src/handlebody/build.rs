use std::collections::{BTreeMap, BTreeSet};

use super::{unit_class, Handlebody, HandlebodyError, MarkerOrigin, NucleusMarker, Pi1Status, TwoHandle};
use crate::legendrian::{FrontDiagram, ZigZag};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StandardKnot {
    Unknot,
    Trefoil,
}

impl StandardKnot {
    pub fn front(self) -> FrontDiagram {
        match self {
            StandardKnot::Unknot => FrontDiagram::unknot(),
            StandardKnot::Trefoil => FrontDiagram::trefoil(),
        }
    }

    pub fn seifert_genus(self) -> u32 {
        match self {
            StandardKnot::Unknot => 0,
            StandardKnot::Trefoil => 1,
        }
    }
}

fn standard_handle(knot: StandardKnot, framing: i64) -> TwoHandle {
    let front = knot.front();
    TwoHandle {
        framing,
        legendrian: Some(front.invariants().expect("built-in front")),
        front: Some(front),
        seifert_genus: Some(knot.seifert_genus()),
        ..TwoHandle::default()
    }
}

/// A single 2-handle along a standard knot, with its standard front.
pub fn knot_handle(name: &str, knot: StandardKnot, framing: i64) -> Handlebody {
    let mut x = Handlebody::default();
    x.two_handles.insert(name.to_string(), standard_handle(knot, framing));
    x
}

/// Gompf nucleus G(n): a 0-framed trefoil `fiber` linked once with a
/// (−n)-framed unknot `section`. For n ≥ 2 the unknot carries `n − 2`
/// zig-zags so that both handles satisfy the Stein framing condition.
pub fn gompf_nucleus(n: i64) -> Result<Handlebody, HandlebodyError> {
    if n < 1 {
        return Err(HandlebodyError::BadParameter(format!("G(n) needs n ≥ 1, got {n}")));
    }
    let mut fiber = standard_handle(StandardKnot::Trefoil, 0);
    let mut section = standard_handle(StandardKnot::Unknot, -n);
    if n == 1 {
        for h in [&mut fiber, &mut section] {
            h.legendrian = None;
            h.front = None;
        }
    } else {
        let mut front = FrontDiagram::unknot();
        for k in 0..(n - 2) as usize {
            front = front.stabilize(ZigZag::alternating(k)).expect("unknot front stabilises");
        }
        section.legendrian = Some(front.invariants().expect("stabilised front"));
        section.front = Some(front);
    }
    let mut x = Handlebody::default();
    x.two_handles.insert("fiber".into(), fiber);
    x.two_handles.insert("section".into(), section);
    x.set_linking("fiber", "section", 1);
    x.markers.insert(
        "N".into(),
        NucleusMarker {
            handles: BTreeSet::from(["fiber".to_string(), "section".to_string()]),
            one_handles: BTreeSet::new(),
            torus_handles: vec!["fiber".into()],
            class_t: unit_class("fiber"),
            class_s: unit_class("section"),
            divisor: 1,
            pi1_status: Pi1Status::Proved,
            origin: MarkerOrigin::BuiltIn,
        },
    );
    Ok(x)
}

/// Cusp neighbourhood: a 0-framed trefoil.
pub fn cusp_neighborhood() -> Handlebody {
    knot_handle("fiber", StandardKnot::Trefoil, 0)
}

/// Boundary sum with no linking between the summands. Handles of `y` whose
/// names collide with `x` are renamed via [`Handlebody::fresh_name`].
pub fn boundary_sum(x: &Handlebody, y: &Handlebody) -> Handlebody {
    let mut y = y.clone();
    let mut out = x.clone();
    let ones: Vec<String> = y.one_handles.iter().cloned().collect();
    for name in ones {
        if out.one_handles.contains(&name) || out.two_handles.contains_key(&name) {
            let fresh = fresh_across(&out, &y, &name);
            y.rename_one_handle(&name, &fresh);
        }
    }
    let twos: Vec<String> = y.two_handles.keys().cloned().collect();
    for name in twos {
        if out.one_handles.contains(&name) || out.two_handles.contains_key(&name) {
            let fresh = fresh_across(&out, &y, &name);
            y.rename_two_handle(&name, &fresh);
        }
    }
    let mut markers = BTreeMap::new();
    for (name, m) in y.markers {
        let fresh = if out.markers.contains_key(&name) || markers.contains_key(&name) {
            (2..).map(|k| format!("{name}#{k}")).find(|n| !out.markers.contains_key(n)).expect("unbounded")
        } else {
            name
        };
        markers.insert(fresh, m);
    }
    let taken: BTreeSet<String> = out.cork_registry.iter().map(|c| c.id.clone()).collect();
    for mut c in y.cork_registry {
        if taken.contains(&c.id) {
            c.id = (2..).map(|k| format!("{}#{k}", c.id)).find(|n| !taken.contains(n)).expect("unbounded");
        }
        out.cork_registry.push(c);
    }
    out.one_handles.extend(y.one_handles);
    out.two_handles.extend(y.two_handles);
    out.markers.extend(markers);
    out.knot_surgeries.extend(y.knot_surgeries);
    out
}

fn fresh_across(x: &Handlebody, y: &Handlebody, base: &str) -> String {
    let taken = |n: &str| {
        x.two_handles.contains_key(n) || x.one_handles.contains(n) || y.two_handles.contains_key(n) || y.one_handles.contains(n)
    };
    (2..).map(|k| format!("{base}#{k}")).find(|n| !taken(n)).expect("unbounded search")
}
