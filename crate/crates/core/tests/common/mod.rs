#![allow(dead_code)]

use std::sync::{Arc, OnceLock};

use cdga::linalg::{q, SparseVec};
use cdga::{Element, Presentation, PresentationBuilder};

pub fn nonformal(cap: u32) -> Arc<Presentation> {
    PresentationBuilder::new("N")
        .gen("a", 3)
        .gen("b", 3)
        .gen("x", 5)
        .d("x", "a*b")
        .cap(cap)
        .build()
        .unwrap()
}

pub fn sl81(cap: u32) -> Arc<Presentation> {
    PresentationBuilder::new("SL81")
        .gen("a", 2)
        .gen("b", 3)
        .gen("x", 5)
        .rel("a^4")
        .rel("a*b")
        .rel("a*x")
        .d("x", "a^3")
        .cap(cap)
        .build()
        .unwrap()
}

pub fn s3d(cap: u32) -> Arc<Presentation> {
    PresentationBuilder::new("S3d")
        .gen("a", 1)
        .gen("b", 1)
        .gen("c", 1)
        .d("a", "b*c")
        .d("b", "a*c")
        .d("c", "a*b")
        .non_simply_connected()
        .cap(cap)
        .build()
        .unwrap()
}

pub fn wedge(cap: u32) -> Arc<Presentation> {
    PresentationBuilder::new("W")
        .gen("a", 3)
        .gen("b", 3)
        .gen("x", 5)
        .d("x", "a*b")
        .rel("a*b*x")
        .cap(cap)
        .build()
        .unwrap()
}

/// Minimal model of `S^n`.
pub fn sphere(n: u32, cap: u32) -> Arc<Presentation> {
    let name = format!("S{n}");
    let b = PresentationBuilder::new(name.as_str()).gen("a", n).cap(cap);
    if n % 2 == 0 {
        b.gen("y", 2 * n - 1).d("y", "a^2").build().unwrap()
    } else {
        b.build().unwrap()
    }
}

/// A fixed zoo of presentations of mixed shape.
pub fn zoo() -> &'static [Arc<Presentation>] {
    static ZOO: OnceLock<Vec<Arc<Presentation>>> = OnceLock::new();
    ZOO.get_or_init(|| {
        vec![
            nonformal(14),
            sl81(12),
            s3d(5),
            wedge(12),
            sphere(4, 16),
            PresentationBuilder::new("M")
                .gen("a", 2)
                .gen("b", 2)
                .gen("x", 3)
                .gen("y", 3)
                .d("x", "a^2")
                .d("y", "a*b")
                .cap(10)
                .build()
                .unwrap(),
        ]
    })
}

/// Homogeneous element of degree `k` with coefficients drawn from `seed`.
pub fn element(p: &Presentation, k: u32, seed: &[i64]) -> Element {
    let dim = p.dim(k);
    let v: SparseVec = (0..dim)
        .filter_map(|i| {
            let c = seed.get(i % seed.len().max(1)).copied().unwrap_or(0);
            (c != 0).then(|| (i, q(c)))
        })
        .collect();
    p.from_coords(k, &v)
}

pub fn koszul(i: u32, j: u32) -> i64 {
    if i % 2 == 1 && j % 2 == 1 {
        -1
    } else {
        1
    }
}
