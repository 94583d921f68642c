//! End-to-end acceptance checks, one test per criterion. Each prints a
//! single PASS/FAIL line.

// `ensure!(a <= tol)` must also fail on NaN, hence the negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::collections::HashMap;

use num_traits::{One, Zero};
use objcmp::expr::{self, CanonicalPolynomial, Expression, Monomial};
use objcmp::ideal::{ideal_elements, in_ideal, parse_relations, principal_generator, relevant_characteristics, residue};
use objcmp::numerics::nnls;
use objcmp::order_laplacian::{build_graph, committors, laplacian, sinks};
use objcmp::spectral::{sort_objects, symmetrize_check};
use objcmp::weights::{commonality_features, fit_weights, predict, similarity_targets};
use objcmp::{enumerate_normal_form_order, DenseMatrix, FeatureCoding, RatingMatrix, Rational, RingContext, RingElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn report(id: u32, name: &str, outcome: Check) {
    match outcome {
        Ok(()) => println!("PASS criterion {id}: {name}"),
        Err(e) => {
            println!("FAIL criterion {id}: {name}: {e}");
            panic!("criterion {id} failed: {e}");
        }
    }
}

fn el(ctx: &RingContext, text: &str) -> Result<RingElement, String> {
    let e = expr::parse(text, ctx).map_err(|e| e.to_string())?;
    expr::eval(&e, ctx, None).map_err(|e| e.to_string())
}

fn fairy_tale_ratings() -> RatingMatrix<f64> {
    let off = DenseMatrix::from_rows(&[
        [0., 3., 3., 10., 10.],
        [3., 0., 10., 5., 3.],
        [3., 10., 0., 3., 5.],
        [10., 3., 2., 0., 3.],
        [8., 3., 8., 3., 0.],
    ])
    .unwrap();
    RatingMatrix::assemble(&off).unwrap()
}

const XOR_TABLE: [[usize; 8]; 8] = [
    [0, 1, 2, 3, 4, 5, 6, 7],
    [1, 0, 4, 5, 2, 3, 7, 6],
    [2, 4, 0, 6, 1, 7, 3, 5],
    [3, 5, 6, 0, 7, 1, 2, 4],
    [4, 2, 1, 7, 0, 6, 5, 3],
    [5, 3, 7, 1, 6, 0, 4, 2],
    [6, 7, 3, 2, 5, 4, 0, 1],
    [7, 6, 5, 4, 3, 2, 1, 0],
];

const AND_TABLE: [[usize; 8]; 8] = [
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 3, 3, 5, 5, 0, 1],
    [0, 3, 2, 3, 6, 0, 6, 2],
    [0, 3, 3, 3, 0, 0, 0, 3],
    [0, 5, 6, 0, 4, 5, 6, 4],
    [0, 5, 0, 0, 5, 5, 0, 5],
    [0, 0, 6, 0, 6, 0, 6, 6],
    [0, 1, 2, 3, 4, 5, 6, 7],
];

const GEQ_TABLE: [&str; 8] = [
    "+.......", "++.+.+..", "+.++..+.", "+..+....", "+...+++.", "+....+..", "+.....+.", "++++++++",
];

fn ring_tables() -> Check {
    let ctx = RingContext::new(["A", "B"]).unwrap();
    let elements = enumerate_normal_form_order(&ctx).map_err(|e| e.to_string())?;
    let names: Vec<String> = elements.iter().map(ToString::to_string).collect();
    ensure!(
        names == ["0", "A", "B", "A*B", "A+B", "A+A*B", "B+A*B", "A+B+A*B"],
        "element list differs: {names:?}"
    );
    let index = |x: &RingElement| elements.iter().position(|e| e == x).unwrap();
    let mut cells = 0;
    for i in 0..8 {
        for j in 0..8 {
            let (x, y) = (&elements[i], &elements[j]);
            ensure!(index(&x.xor(y).unwrap()) == XOR_TABLE[i][j], "xor cell ({i},{j})");
            ensure!(index(&x.and(y).unwrap()) == AND_TABLE[i][j], "and cell ({i},{j})");
            let plus = GEQ_TABLE[i].as_bytes()[j] == b'+';
            ensure!(x.geq(y).unwrap() == plus, ">= cell ({i},{j})");
            cells += 3;
        }
    }
    ensure!(cells == 192, "compared {cells} cells");
    Ok(())
}

#[test]
fn criterion_01_ring_tables() {
    report(1, "m=2 element list and xor, and, >= tables (192 cells)", ring_tables());
}

fn characteristics_table() -> Check {
    let ctx = RingContext::new(["A", "B", "C"]).unwrap();
    let table = [
        ("big", "A+(B*A)+(C*A)+(A*B*C)"),
        ("small", "(B*C)+(A*B*C)"),
        ("circle", "B+(A*B)+(C*B)+(A*B*C)"),
        ("triangle", "(A*C)+(A*B*C)"),
        ("blue", "C+(A*C)+(B*C)+(A*B*C)"),
        ("red", "(A*B)+(A*B*C)"),
    ];
    let mut values = HashMap::new();
    for (name, text) in table {
        let v = el(&ctx, text)?;
        ensure!(v.is_atom(), "{name} is not an atom: {v}");
        values.insert(name, v);
    }
    let small_blue = values["small"].union(&values["blue"]).unwrap();
    ensure!(small_blue == el(&ctx, "C+A*C")?, "small ∪ blue = {small_blue}");
    let sbc = small_blue.union(&values["circle"]).unwrap();
    ensure!(sbc == el(&ctx, "C+B+A*C+A*B+B*C+A*B*C")?, "small blue circle = {sbc}");
    Ok(())
}

#[test]
fn criterion_02_characteristics() {
    report(2, "shape and colour characteristics are atoms; small blue circle union", characteristics_table());
}

fn ideal_example() -> Check {
    let ctx = RingContext::new(["a", "b", "c"]).unwrap();
    let relations = parse_relations("a*c = 0\nc >= b\n", &ctx).map_err(|e| e.to_string())?;
    let g = principal_generator(&relations, &ctx).map_err(|e| e.to_string())?;
    ensure!(g.atom_count() == 4, "generator has {} atoms", g.atom_count());
    ensure!(g == el(&ctx, "(a*c)+b+(c*b)")?, "generator {g}");

    let listing = [
        "0", "a*c", "a*b", "a*b*c", "b+b*c", "a*b+a*b*c", "a*b+a*c", "a*c+a*b*c",
        "a*c+b+b*c", "a*c+a*b+a*b*c", "a*b+b+b*c", "a*b*c+b+b*c", "a*c+b+b*c+a*b",
        "a*c+b+b*c+a*b*c", "a*b+b+b*c+a*b*c", "a*c+a*b+a*b*c+b+b*c",
    ];
    let mut expected: Vec<RingElement> = listing.iter().map(|s| el(&ctx, s)).collect::<Result<_, _>>()?;
    expected.sort();
    expected.dedup();
    ensure!(expected.len() == 16, "listing has {} distinct elements", expected.len());
    let ideal = ideal_elements(&g).map_err(|e| e.to_string())?;
    ensure!(ideal == expected, "ideal differs from the listing");
    for extra in ["a*b", "a*b*c"] {
        ensure!(in_ideal(&el(&ctx, extra)?, &g).unwrap(), "{extra} not in ideal");
    }

    let found = relevant_characteristics(&relations, &ctx).map_err(|e| e.to_string())?;
    let mut wanted: Vec<RingElement> =
        ["a", "b", "b+c"].iter().map(|s| residue(&el(&ctx, s).unwrap(), &g).unwrap()).collect();
    let mut found_sorted = found.clone();
    found_sorted.sort();
    wanted.sort();
    ensure!(found_sorted == wanted, "relevant characteristics {found:?}");
    Ok(())
}

#[test]
fn criterion_03_ideal() {
    report(3, "principal ideal of {a*c=0, c>=b}: 4 atoms, 16 elements, 3 classes", ideal_example());
}

fn laplacian_and_committors() -> Check {
    let ctx = RingContext::new(["A", "B"]).unwrap();
    let g = build_graph(&ctx).map_err(|e| e.to_string())?;
    let printed = [
        [-2, 0, 1, 0, 1, 0, 0],
        [0, -2, 1, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, -2, 1, 1, 0],
        [0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0],
        [1, 1, 1, 1, 1, 1, -6],
    ];
    let l = laplacian::<Rational>(&g);
    for (i, row) in printed.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            ensure!(l[(i, j)] == Rational::from_integer((*v).into()), "L[{i}][{j}]");
        }
    }
    let kernel = 7 - rational_rank(&l.to_rows());
    ensure!(kernel == 3, "kernel dimension {kernel}");
    ensure!(sinks(&g).len() == 3, "sinks {:?}", sinks(&g));

    let q: Vec<Vec<f64>> = committors(&g).map_err(|e| e.to_string())?;
    let expected = [
        [0.5, 0.5, 1.0, 0.0, 0.0, 0.0, 1.0 / 3.0],
        [0.5, 0.0, 0.0, 0.5, 1.0, 0.0, 1.0 / 3.0],
        [0.0, 0.5, 0.0, 0.5, 0.0, 1.0, 1.0 / 3.0],
    ];
    for (got, want) in q.iter().zip(&expected) {
        ensure!(common::max_abs_diff(got, want) <= 1e-9, "committor {got:?}");
    }
    for x in 0..7 {
        let total: f64 = q.iter().map(|c| c[x]).sum();
        ensure!((total - 1.0).abs() <= 1e-9, "vertex {x} sums to {total}");
    }
    Ok(())
}

/// Rank by fraction-exact Gaussian elimination.
fn rational_rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = m[r][c].clone() / m[rank][c].clone();
                let pivot = m[rank].clone();
                for (dst, src) in m[r].iter_mut().zip(&pivot).skip(c) {
                    *dst = dst.clone() - f.clone() * src.clone();
                }
            }
        }
        rank += 1;
    }
    rank
}

#[test]
fn criterion_04_laplacian_committors() {
    report(4, "order-graph Laplacian and committors for m=2", laplacian_and_committors());
}

fn spectral_sort() -> Check {
    let r = fairy_tale_ratings();
    let printed = [
        [0., 3., 3., 10., 10.],
        [3., 5., 10., 5., 3.],
        [3., 10., 5., 3., 5.],
        [10., 3., 2., 8., 3.],
        [8., 3., 8., 3., 4.],
    ];
    ensure!(r.entries() == &DenseMatrix::from_rows(&printed).unwrap(), "assembled R differs");
    ensure!(r.row_sum_target() == 26.0, "target {}", r.row_sum_target());

    let s = sort_objects(&r).map_err(|e| e.to_string())?;
    let vec = [0.67003, 0.10815, 0.00000, 1.00000, 0.27644];
    ensure!(common::max_abs_diff(&s.vec, &vec) <= 1e-4, "vec {:?}", s.vec);
    let rc = [15.8541, 10.1459, 7.4738, 18.5262];
    ensure!(common::max_abs_diff(s.rc.as_slice(), &rc) <= 2e-3, "Rc {:?}", s.rc);
    for i in 0..2 {
        let sum = s.rc[(i, 0)] + s.rc[(i, 1)];
        ensure!((sum - 26.0).abs() <= 1e-8, "Rc row {i} sums to {sum}");
    }
    let names = ["Hansel", "Witch", "Stepmother", "Gretel", "Father"];
    let row: Vec<&str> = s.order.iter().map(|&i| names[i]).collect();
    ensure!(row == ["Gretel", "Hansel", "Father", "Witch", "Stepmother"], "sorted row {row:?}");
    Ok(())
}

#[test]
fn criterion_05_spectral_sort() {
    report(5, "fairy-tale ratings: R, vec, Rc and sorted row", spectral_sort());
}

fn symmetrization() -> Check {
    let r = fairy_tale_ratings();
    let s = sort_objects(&r).map_err(|e| e.to_string())?;
    let chk = symmetrize_check(&s, &r).map_err(|e| e.to_string())?;
    ensure!(chk.symmetry_defect <= 1e-8, "fairy-tale R defect {}", chk.symmetry_defect);

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    while checked < 100 {
        let n = rng.random_range(3..=8);
        let r = common::random_ratings(&mut rng, n, 0.1, 10.0);
        let s = match sort_objects(&r) {
            Ok(s) => s,
            Err(e) if e.is_model_violation() => continue,
            Err(e) => return Err(e.to_string()),
        };
        let chk = symmetrize_check(&s, &r).map_err(|e| e.to_string())?;
        ensure!(chk.symmetry_defect <= 1e-8, "random case {checked}: defect {}", chk.symmetry_defect);
        checked += 1;
    }
    Ok(())
}

#[test]
fn criterion_06_symmetrization() {
    report(6, "chi^T (R + D) chi is symmetric", symmetrization());
}

fn shift_invariance() -> Check {
    let r = fairy_tale_ratings();
    let base = sort_objects(&r).map_err(|e| e.to_string())?;
    for c in [1.0, 7.0, 100.0] {
        let s = sort_objects(&r.shifted(c).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure!(s.order == base.order, "order changed for c={c}");
        let d = common::max_abs_diff(&s.vec, &base.vec);
        ensure!(d <= 1e-9, "vec changed by {d} for c={c}");
    }
    Ok(())
}

#[test]
fn criterion_07_shift_invariance() {
    report(7, "sort is invariant under R + cI", shift_invariance());
}

fn regression() -> Check {
    let objects = ["Hansel", "Witch", "Stepmother", "Gretel", "Father"].map(String::from).to_vec();
    let coding = FeatureCoding::from_bit_strings(
        objects,
        &["00011110", "11100001", "11110000", "10010110", "01011010"],
    )
    .map_err(|e| e.to_string())?;
    let coords = DenseMatrix::from_vec(5, 1, vec![0.67003, 0.10815, 0.00000, 1.00000, 0.27644]).unwrap();
    let targets = similarity_targets(&coords, 10.0).map_err(|e| e.to_string())?;
    let intended = [0.04254, 0.01122, 0.33662, 0.21244, 0.88962, 0.00036, 0.75336, 0.00004, 0.46572, 0.00532];
    ensure!(common::max_abs_diff(&targets, &intended) <= 1e-4, "targets {targets:?}");

    let f = commonality_features(&coding).map_err(|e| e.to_string())?;
    let model = fit_weights(&f, &targets).map_err(|e| e.to_string())?;
    ensure!(model.weights[7].is_none(), "w8 should be unlearned");
    let w: Vec<f64> = model.weights[..7].iter().map(|w| w.unwrap_or(f64::NAN)).collect();
    let printed = [0.00020, 0.60954, 0.27988, 0.00000, 0.20711, 0.33130, 0.00532];
    ensure!(common::max_abs_diff(&w, &printed) <= 1e-3, "weights {w:?}");

    let trained = [0.00000, 0.00000, 0.33662, 0.21244, 0.88962, 0.00020, 0.60954, 0.00020, 0.60954, 0.00532];
    let predicted: Vec<f64> = f.rows.iter().map(|row| predict(&model, row)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    ensure!(common::max_abs_diff(&predicted, &trained) <= 1e-3, "predictions {predicted:?}");

    let design: Vec<Vec<Rational>> = f
        .rows
        .iter()
        .map(|row| row[..7].iter().map(|&b| if b { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    let rank = rational_rank(&design);
    ensure!(rank == 7, "design rank {rank}");
    Ok(())
}

#[test]
fn criterion_08_regression() {
    report(8, "similarity targets, NNLS weights, trained values, rank 7", regression());
}

fn random_ast(rng: &mut impl Rng, depth: u32) -> Expression {
    if depth == 0 || rng.random_bool(0.3) {
        return match rng.random_range(0..6) {
            0 => Expression::Zero,
            1 => Expression::One,
            k => Expression::var(["a", "b", "c", "d"][k - 2]),
        };
    }
    let k = rng.random_range(2..4);
    let children: Vec<Expression> = (0..k).map(|_| random_ast(rng, depth - 1)).collect();
    match rng.random_range(0..3) {
        0 => Expression::xor(children),
        1 => Expression::and(children),
        _ => Expression::complement(children.into_iter().next().unwrap()),
    }
}

fn property_suites() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let names = ["a", "b", "c", "d", "e", "f"];

    for case in 0..10_000 {
        let m = rng.random_range(1..=6);
        let ctx = RingContext::new(names[..m].iter().copied()).unwrap();
        let mut draw = || ctx.from_bits(rng.random());
        let (x, y, z) = (draw(), draw(), draw());
        let ok = x.xor(&y).unwrap().xor(&z).unwrap() == x.xor(&y.xor(&z).unwrap()).unwrap()
            && x.and(&y).unwrap().and(&z).unwrap() == x.and(&y.and(&z).unwrap()).unwrap()
            && x.xor(&y).unwrap() == y.xor(&x).unwrap()
            && x.and(&y).unwrap() == y.and(&x).unwrap()
            && x.and(&y.xor(&z).unwrap()).unwrap() == x.and(&y).unwrap().xor(&x.and(&z).unwrap()).unwrap()
            && x.and(&x).unwrap() == x
            && x.xor(&x).unwrap().is_zero()
            && x.and(&ctx.one()).unwrap() == x
            && x.xor(&ctx.zero()).unwrap() == x
            && x.union(&y).unwrap() == x.xor(&y).unwrap().xor(&x.and(&y).unwrap()).unwrap();
        ensure!(ok, "ring law violated in case {case}");
    }

    let ctx4 = RingContext::new(["a", "b", "c", "d"]).unwrap();
    for case in 0..1_000 {
        let e = random_ast(&mut rng, 4);
        let direct = expr::eval(&e, &ctx4, None).map_err(|e| e.to_string())?;
        let rebuilt = expr::eval(&expr::expand(&e).to_expression(), &ctx4, None).map_err(|e| e.to_string())?;
        ensure!(direct == rebuilt, "expand changed the value of AST {case}: {e}");
    }

    for case in 0..1_000 {
        let m = rng.random_range(1..=4);
        let ctx = RingContext::new(names[..m].iter().copied()).unwrap();
        let mut draw = || ctx.from_bits(rng.random());
        let (x, y, g) = (draw(), draw(), draw());
        let same = residue(&x, &g).unwrap() == residue(&y, &g).unwrap();
        ensure!(same == in_ideal(&x.xor(&y).unwrap(), &g).unwrap(), "coset consistency case {case}");
    }

    const WALKS: usize = 100_000;
    let mut walk_rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..20 {
        let n = walk_rng.random_range(3..=12);
        let g = common::random_dag(&mut walk_rng, n, 0.35);
        let q: Vec<Vec<f64>> = committors(&g).map_err(|e| e.to_string())?;
        let counts = common::absorption_counts(&g, 0, WALKS, &mut walk_rng);
        for (qc, &c) in q.iter().zip(&sinks(&g)) {
            let p = qc[0];
            let freq = counts[c] as f64 / WALKS as f64;
            let sigma = (p * (1.0 - p) / WALKS as f64).sqrt();
            ensure!((freq - p).abs() <= 3.0 * sigma + 1e-12, "DAG {case}, sink {c}: {freq} vs {p}");
        }
    }

    for case in 0..100 {
        let qn = rng.random_range(1..=8);
        let pn = rng.random_range(qn..=12);
        let a = DenseMatrix::from_fn(pn, qn, |_, _| rng.random_range(-1.0..1.0));
        let b: Vec<f64> = (0..pn).map(|_| rng.random_range(-2.0..2.0)).collect();
        let s = nnls(&a, &b).map_err(|e| e.to_string())?;
        for (w, g) in s.x.iter().zip(&s.gradient) {
            ensure!(*w >= 0.0 && *g >= -1e-8 && (w * g).abs() <= 1e-8, "KKT violated in NNLS case {case}");
        }
    }
    Ok(())
}

#[test]
fn criterion_09_property_suites() {
    report(9, "ring laws, expand, residues, committors vs random walks, NNLS KKT", property_suites());
}

fn expression_costs() -> Check {
    let long = Expression::parse("(a*c)+b+(c*b)").map_err(|e| e.to_string())?;
    let short = Expression::parse("((a+b)*c)+b").map_err(|e| e.to_string())?;
    ensure!(expr::cost(&long) == 4, "cost {}", expr::cost(&long));
    ensure!(expr::cost(&short) == 3, "cost {}", expr::cost(&short));
    ensure!(expr::equivalent(&long, &short), "not equivalent");

    let terms = [
        "a*(1+b)*(1+c)*(1+d)",
        "b*(1+a)*(1+c)*(1+d)",
        "c*(1+a)*(1+b)*(1+d)",
        "d*(1+a)*(1+b)*(1+c)",
    ];
    let parsed: Vec<Expression> = terms.iter().map(|t| Expression::parse(t)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let union = parsed.into_iter().reduce(Expression::union).unwrap();
    let expanded = expr::expand(&union);
    let expected = CanonicalPolynomial::from_monomials(
        [vec!["a", "b", "c"], vec!["a", "b", "d"], vec!["a", "c", "d"], vec!["b", "c", "d"], vec!["a"], vec!["b"], vec!["c"], vec!["d"]]
            .into_iter()
            .map(Monomial::new),
    );
    ensure!(expanded == expected, "union expands to {expanded}");
    let rewritten = Expression::parse("((1+c*d)*(a+b))+((1+a*b)*(c+d))").map_err(|e| e.to_string())?;
    ensure!(expr::equivalent(&rewritten, &union), "rewritten form differs");
    Ok(())
}

#[test]
fn criterion_10_expression_costs() {
    report(10, "comparison costs 4 vs 3; peculiarity union", expression_costs());
}
