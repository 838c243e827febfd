// Shared by several test targets; not every target uses every helper.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;

use amscheme_core::alphabet::FiniteAbelianGroup;
use amscheme_core::codes::descriptor::CodeDescriptor;
use amscheme_core::codes::qr::f4_scheme;
use amscheme_core::codes::{
    dual_code, macwilliams_transform, weight_distribution, weight_enumerator, BlockCode,
};
use amscheme_core::extension::{composition_of, Composition};
use amscheme_core::interpolation::{interpolate, least_space, mu_rank, PointSet};
use amscheme_core::linalg;
use amscheme_core::scheme::{
    build_cycle_scheme, build_group_scheme, build_trivial_scheme, dual_scheme, AssociationScheme,
};
use num::{BigInt, BigRational};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn load_code(name: &str) -> BlockCode {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    serde_json::from_str::<CodeDescriptor>(&text)
        .unwrap()
        .build()
        .unwrap()
}

pub fn load_table(name: &str) -> BTreeMap<Composition, u64> {
    serde_json::from_str(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

pub fn comps(v: &[&[u32]]) -> BTreeSet<Composition> {
    v.iter().map(|a| Composition(a.to_vec())).collect()
}

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// ℤ_k group schemes and k-cycle schemes for k ≤ 8, trivial schemes for
/// q ≤ 5, and F₄.
pub fn builtin_schemes() -> Vec<AssociationScheme> {
    let mut out = Vec::new();
    for k in 2..=8 {
        out.push(build_group_scheme(&FiniteAbelianGroup::cyclic(k).unwrap()).unwrap());
        if k >= 3 {
            out.push(build_cycle_scheme(k).unwrap());
        }
    }
    for q in 2..=5 {
        out.push(build_trivial_scheme(q).unwrap());
    }
    out.push(f4_scheme().unwrap());
    out
}

/// AS1–AS4 straight from the relation table, independent of the builder.
pub fn check_axioms(s: &AssociationScheme) -> Result<(), String> {
    let r = s.relation_table();
    let n = s.size();
    let d = s.classes() + 1;
    for x in 0..n {
        for y in 0..n {
            if (r[x][y] == 0) != (x == y) {
                return Err(format!("AS1 fails at ({x},{y})"));
            }
        }
    }
    let used: BTreeSet<usize> = r.iter().flatten().copied().collect();
    if used.len() != d {
        return Err("AS2: some class is empty".into());
    }
    for x in 0..n {
        for y in 0..n {
            if r[y][x] != s.transpose_class(r[x][y]) {
                return Err(format!("AS3 fails at ({x},{y})"));
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            let k = r[x][y];
            let mut counts = vec![vec![0u64; d]; d];
            for z in 0..n {
                counts[r[x][z]][r[z][y]] += 1;
            }
            for i in 0..d {
                for j in 0..d {
                    if counts[i][j] != s.intersection_number(i, j, k) {
                        return Err(format!("AS4: p_{i}{j}^{k} differs at ({x},{y})"));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Dual by brute force: every y ∈ ℤ₄ⁿ with Σ xᵢyᵢ ≡ 0 (mod 4) for all generators.
pub fn brute_dual_z4(gens: &[Vec<u8>], n: usize) -> Vec<Vec<u8>> {
    (0..4usize.pow(n as u32))
        .map(|mut i| {
            (0..n)
                .map(|_| {
                    let d = (i % 4) as u8;
                    i /= 4;
                    d
                })
                .collect::<Vec<u8>>()
        })
        .filter(|y| {
            gens.iter().all(|g| {
                g.iter()
                    .zip(y)
                    .map(|(&a, &b)| a as u32 * b as u32)
                    .sum::<u32>()
                    % 4
                    == 0
            })
        })
        .collect()
}

/// Draws random ℤ₄ codes (n ≤ 6, alternating group and cycle schemes) and
/// checks the transform against the brute-force dual. Returns the number of
/// codes checked.
pub fn macwilliams_oracle(rng: &mut ChaCha8Rng, codes: usize) -> Result<usize, String> {
    let z4 = FiniteAbelianGroup::cyclic(4).unwrap();
    let schemes = [
        Arc::new(build_group_scheme(&z4).unwrap()),
        Arc::new(build_cycle_scheme(4).unwrap()),
    ];
    let mut checked = 0;
    while checked < codes {
        let scheme = &schemes[checked % 2];
        let n = rng.gen_range(1..=6);
        let k = rng.gen_range(1..=3);
        let gens: Vec<Vec<u8>> = (0..k)
            .map(|_| (0..n).map(|_| rng.gen_range(0..4)).collect())
            .collect();
        // {0} and the whole space are not codes
        let Ok(code) = BlockCode::additive(scheme.clone(), n, gens.clone()) else {
            continue;
        };
        let dual_words = brute_dual_z4(&gens, n);
        if code.size() * dual_words.len() as u128 != 4u128.pow(n as u32) {
            return Err(format!("|C||C⊥| ≠ 4^n for {gens:?}"));
        }
        let dual = dual_scheme(scheme).map_err(|e| e.to_string())?;
        let zero = vec![0u8; n];
        let mut expected: BTreeMap<Composition, BigInt> = BTreeMap::new();
        for w in &dual_words {
            *expected
                .entry(composition_of(&zero, w, &dual).unwrap())
                .or_default() += 1;
        }
        let w = weight_enumerator(&code).map_err(|e| e.to_string())?;
        let t = macwilliams_transform(&w, scheme).map_err(|e| e.to_string())?;
        if t.integer_terms() != Some(expected.clone()) {
            return Err(format!(
                "transform disagrees with the enumerated dual for {gens:?}"
            ));
        }
        // the library dual agrees with the brute-force one
        let d = dual_code(&code).map_err(|e| e.to_string())?;
        let mut lib = d.enumerate().map_err(|e| e.to_string())?;
        lib.sort();
        let mut brute = dual_words;
        brute.sort();
        if lib != brute {
            return Err(format!("dual_code differs from brute force for {gens:?}"));
        }
        let lib_wd: BTreeMap<Composition, BigInt> = weight_distribution(&d, None)
            .unwrap()
            .counts
            .into_iter()
            .map(|(a, c)| (a, BigInt::from(c)))
            .collect();
        if lib_wd != expected {
            return Err(format!("dual distribution differs for {gens:?}"));
        }
        checked += 1;
    }
    Ok(checked)
}

pub fn random_invertible(
    rng: &mut ChaCha8Rng,
    dim: usize,
) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    loop {
        let a: Vec<Vec<BigRational>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| q(rng.gen_range(-3..=3), rng.gen_range(1..=3)))
                    .collect()
            })
            .collect();
        if linalg::rank(&a) == dim {
            let b = (0..dim)
                .map(|_| q(rng.gen_range(-5..=5), rng.gen_range(1..=4)))
                .collect();
            return (a, b);
        }
    }
}

/// μ from the rank recursion equals the least-space degree, μ ≤ |S| − 1,
/// μ is invariant under `maps` random affine maps, and interpolation
/// reproduces random values exactly within degree μ.
pub fn check_point_set(s: &PointSet, rng: &mut ChaCha8Rng, maps: usize) -> Result<(), String> {
    let space = least_space(s).map_err(|e| e.to_string())?;
    let mu = mu_rank(s);
    if mu != space.mu() {
        return Err(format!("mu_rank {mu} vs least space {}", space.mu()));
    }
    if mu > s.len() as i64 - 1 || space.basis().len() != s.len() {
        return Err("degree or dimension out of range".into());
    }
    for _ in 0..maps {
        let (a, b) = random_invertible(rng, s.dim());
        let image = s.map_affine(&a, &b).map_err(|e| e.to_string())?;
        if mu_rank(&image) != mu {
            return Err("mu is not affine invariant".into());
        }
    }
    let values: Vec<BigRational> = (0..s.len())
        .map(|_| q(rng.gen_range(-9..=9), rng.gen_range(1..=5)))
        .collect();
    let f = interpolate(&space, &values).map_err(|e| e.to_string())?;
    if f.degree() > mu {
        return Err("interpolant degree exceeds mu".into());
    }
    if s.points().iter().zip(&values).any(|(p, v)| &f.eval(p) != v) {
        return Err("interpolant misses a prescribed value".into());
    }
    Ok(())
}

pub fn random_point_set(rng: &mut ChaCha8Rng) -> PointSet {
    let dim = rng.gen_range(1..=3);
    let size = rng.gen_range(1..=8);
    let mut pts = BTreeSet::new();
    while pts.len() < size {
        pts.insert(
            (0..dim)
                .map(|_| rng.gen_range(-4i64..=4))
                .collect::<Vec<_>>(),
        );
    }
    PointSet::from_integers(dim, &pts.into_iter().collect::<Vec<_>>()).unwrap()
}
