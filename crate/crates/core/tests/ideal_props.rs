use objcmp::ideal::{ideal_elements, in_ideal, residue};
use objcmp::RingContext;
use proptest::prelude::*;

const NAMES: [&str; 4] = ["a", "b", "c", "d"];

fn triple() -> impl Strategy<Value = (usize, u64, u64, u64)> {
    (1usize..=4).prop_flat_map(|m| {
        let top = (1u64 << ((1 << m) - 1)) - 1;
        (Just(m), 0..=top, 0..=top, 0..=top)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    #[test]
    fn residue_classes((m, x, y, g) in triple()) {
        let ctx = RingContext::new(NAMES[..m].iter().copied()).unwrap();
        let (x, y, g) = (ctx.from_bits(x), ctx.from_bits(y), ctx.from_bits(g));
        let rx = residue(&x, &g)?;
        prop_assert!(in_ideal(&x.xor(&rx)?, &g)?);
        prop_assert_eq!(residue(&rx, &g)?, rx.clone());
        prop_assert_eq!(rx == residue(&y, &g)?, in_ideal(&x.xor(&y)?, &g)?);
        prop_assert!(rx.and(&g)?.is_zero());
    }

    #[test]
    fn ideal_is_closed((m, x, g) in (1usize..=3).prop_flat_map(|m| {
        let top = (1u64 << ((1 << m) - 1)) - 1;
        (Just(m), 0..=top, 0..=top)
    })) {
        let ctx = RingContext::new(NAMES[..m].iter().copied()).unwrap();
        let (x, g) = (ctx.from_bits(x), ctx.from_bits(g));
        let ideal = ideal_elements(&g)?;
        prop_assert_eq!(ideal.len(), 1usize << g.atom_count());
        for (i, p) in ideal.iter().enumerate() {
            prop_assert!(in_ideal(p, &g)?);
            prop_assert!(in_ideal(&p.and(&x)?, &g)?);
            let q = &ideal[(i * 7 + 3) % ideal.len()];
            prop_assert!(in_ideal(&p.xor(q)?, &g)?);
        }
        prop_assert!(ideal.windows(2).all(|w| w[0] < w[1]));
    }
}
