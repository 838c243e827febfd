use super::qr::*;
use super::*;
use crate::alphabet::FiniteAbelianGroup;
use crate::scheme::{build_cycle_scheme, build_group_scheme, build_trivial_scheme};

fn table(entries: &[(&[u32], u64)]) -> BTreeMap<Composition, u64> {
    entries
        .iter()
        .map(|(a, c)| (Composition(a.to_vec()), *c))
        .collect()
}

fn perms3(a: [u32; 3]) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for p in [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ] {
        let v = [a[p[0]], a[p[1]], a[p[2]]];
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn repetition() -> BlockCode {
    let s = Arc::new(build_trivial_scheme(2).unwrap());
    BlockCode::from_words(s, vec![vec![0, 0, 0], vec![1, 1, 1]]).unwrap()
}

#[test]
fn repetition_code_distributions() {
    let c = repetition();
    let wd = weight_distribution(&c, None).unwrap();
    assert_eq!(wd.counts, table(&[(&[0], 1), (&[3], 1)]));
    let inner = inner_distribution(&c).unwrap();
    assert_eq!(inner.len(), 2);
    let w = weight_enumerator(&c).unwrap();
    assert_eq!(w.to_string(), "x0^3 + x1^3");
    let t = macwilliams_transform(&w, c.scheme()).unwrap();
    // dual is the even-weight code: 1 + 3 x1^2
    let ints = t.integer_terms().unwrap();
    assert_eq!(ints.len(), 2);
    assert_eq!(ints[&Composition(vec![2])], BigInt::from(3));
    assert_eq!(macwilliams_transform_dual(&t, c.scheme()).unwrap(), w);
}

#[test]
fn size_invariant_enforced() {
    let s = Arc::new(build_trivial_scheme(2).unwrap());
    assert!(BlockCode::from_words(s.clone(), vec![vec![0, 1]]).is_err());
    let all = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
    assert!(BlockCode::from_words(s.clone(), all).is_err());
    assert!(BlockCode::from_words(s.clone(), vec![vec![0, 1], vec![0]]).is_err());
    assert!(BlockCode::from_words(s, vec![vec![0, 2], vec![0, 0]]).is_err());
}

#[test]
fn explicit_and_additive_agree() {
    let s = Arc::new(build_cycle_scheme(4).unwrap());
    let add = BlockCode::additive(s.clone(), 4, vec![vec![1, 2, 0, 3], vec![0, 2, 2, 0]]).unwrap();
    let words = add.enumerate().unwrap();
    assert_eq!(words.len() as u128, add.size());
    let exp = BlockCode::from_words(s, words).unwrap();
    assert_eq!(
        weight_distribution(&add, None).unwrap(),
        weight_distribution(&exp, None).unwrap()
    );
    assert_eq!(
        inner_distribution(&add).unwrap(),
        inner_distribution(&exp).unwrap()
    );
}

#[test]
fn xq11_f3_table() {
    let c = xq11_f3().unwrap();
    let wd = weight_distribution(&c, None).unwrap();
    let expected = table(&[
        (&[0, 0], 1),
        (&[6, 0], 22),
        (&[0, 6], 22),
        (&[3, 3], 220),
        (&[6, 3], 220),
        (&[3, 6], 220),
        (&[12, 0], 1),
        (&[0, 12], 1),
        (&[6, 6], 22),
    ]);
    assert_eq!(wd.counts, expected);
}

#[test]
fn xq11_f5_table() {
    let c = xq11_f5().unwrap();
    let wd = weight_distribution(&c, None).unwrap();
    let expected = table(&[
        (&[0, 0], 1),
        (&[3, 3], 440),
        (&[6, 1], 264),
        (&[1, 6], 264),
        (&[4, 4], 2640),
        (&[7, 2], 1320),
        (&[2, 7], 1320),
        (&[5, 5], 5544),
        (&[8, 3], 1320),
        (&[3, 8], 1320),
        (&[11, 1], 24),
        (&[1, 11], 24),
        (&[6, 6], 1144),
    ]);
    assert_eq!(wd.counts, expected);
}

#[test]
fn xq11_f4_table() {
    let c = xq11_f4().unwrap();
    let wd = weight_distribution(&c, None).unwrap();
    let mut expected = BTreeMap::new();
    expected.insert(Composition(vec![0, 0, 0]), 1);
    for (base, count) in [
        ([2, 2, 2], 330),
        ([5, 1, 1], 132),
        ([4, 4, 0], 165),
        ([3, 3, 3], 1320),
        ([6, 2, 2], 330),
        ([5, 5, 1], 132),
        ([12, 0, 0], 1),
        ([4, 4, 4], 165),
    ] {
        for p in perms3(base) {
            expected.insert(Composition(p.to_vec()), count);
        }
    }
    assert_eq!(wd.counts, expected);
}

#[test]
fn golay_weights() {
    let c = binary_golay().unwrap();
    let wd = weight_distribution(&c, None).unwrap();
    assert_eq!(
        wd.counts,
        table(&[
            (&[0], 1),
            (&[8], 759),
            (&[12], 2576),
            (&[16], 759),
            (&[24], 1)
        ])
    );
}

#[test]
fn self_dual_codes_are_fixed_by_the_transform() {
    for c in [
        xq11_f3().unwrap(),
        xq11_f4().unwrap(),
        xq11_f5().unwrap(),
        binary_golay().unwrap(),
    ] {
        let w = weight_enumerator(&c).unwrap();
        let t = macwilliams_transform(&w, c.scheme()).unwrap();
        assert_eq!(t, w);
    }
}

#[test]
fn dual_code_matches_transform() {
    let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
    let s = Arc::new(build_group_scheme(&g).unwrap());
    let c = BlockCode::additive(s, 3, vec![vec![1, 2, 7], vec![4, 4, 0]]).unwrap();
    let d = dual_code(&c).unwrap();
    assert_eq!(c.size() * d.size(), 8u128.pow(3));
    let w = weight_enumerator(&c).unwrap();
    let t = macwilliams_transform(&w, c.scheme()).unwrap();
    let wd = weight_distribution(&d, None).unwrap();
    assert_eq!(t, wd.to_enumerator());
    // C^⊥⊥ = C as word sets
    let dd = dual_code(&d).unwrap();
    assert_eq!(dd.enumerate().unwrap(), c.enumerate().unwrap());
}

#[test]
fn dual_code_needs_additive() {
    assert!(matches!(dual_code(&repetition()), Err(Error::NotAdditive)));
}

#[test]
fn fusion_to_hamming() {
    let c = xq11_f4().unwrap();
    let w = weight_enumerator(&c).unwrap();
    let h = fuse_enumerator(&w, &[vec![0], vec![1, 2, 3]]).unwrap();
    let trivial = Arc::new(crate::scheme::trivial_scheme_on(c.scheme().group().unwrap()).unwrap());
    let hc = c.with_scheme(trivial).unwrap();
    assert_eq!(h, weight_enumerator(&hc).unwrap());
    assert!(fuse_enumerator(&w, &[vec![0, 1], vec![2, 3]]).is_err());
    assert!(fuse_enumerator(&w, &[vec![0], vec![1, 2]]).is_err());
}

#[test]
fn cap_is_enforced() {
    let c = xq11_f5().unwrap().with_cap(1000);
    assert!(matches!(c.enumerate(), Err(Error::CapExceeded { .. })));
}

#[test]
fn weight_data_round_trip() {
    let c = xq11_f3().unwrap();
    let data = weight_data(&c, None).unwrap();
    let json = serde_json::to_string(&data).unwrap();
    let back: WeightData = serde_json::from_str(&json).unwrap();
    assert_eq!(back, data);
    assert_eq!(data.dual_support, data.wd.keys().cloned().collect());
}

#[test]
fn weight_distribution_from_other_base() {
    let c = xq11_f3().unwrap();
    let words = c.enumerate().unwrap();
    // translation invariance: any codeword as base gives the same distribution
    let wd = weight_distribution(&c, Some(&words[17])).unwrap();
    assert_eq!(wd.counts, weight_distribution(&c, None).unwrap().counts);
}
