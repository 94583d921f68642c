//! One function per subcommand, each producing a [`Report`].

use std::collections::HashMap;

use objcmp::expr::{self, CanonicalPolynomial, Expression};
use objcmp::ideal::{ideal_elements, parse_relations, principal_generator, relevant_characteristics, residue, MAX_IDEAL_ATOMS};
use objcmp::order_laplacian::{build_graph, committors, laplacian, sinks};
use objcmp::spectral::{sort_objects, symmetrize_check};
use objcmp::weights::{commonality_features, fit_weights, predict, similarity_targets};
use objcmp::{
    enumerate_normal_form_order, enumerate_ring, ComparisonGraph, DenseMatrix, FeatureCoding, RatingMatrix, Rational, RingContext,
    RingElement,
};

use crate::input::{generator_list, parse_number, read_file, read_labelled_csv, utf8};
use crate::report::{Report, Table, Value};
use crate::{Failure, Numbering};

/// Largest ring searched for short class representatives in `extract`.
const MAX_REPRESENTATIVE_GENERATORS: usize = 4;

/// Largest generator count accepted by `ring table`.
pub const MAX_TABLE_GENERATORS: usize = 3;

fn context(generators: &str) -> Result<RingContext, Failure> {
    Ok(RingContext::new(generator_list(generators))?)
}

fn numbered(ctx: &RingContext, numbering: Numbering) -> Result<Vec<RingElement>, Failure> {
    Ok(match numbering {
        Numbering::Normal => enumerate_normal_form_order(ctx)?,
        Numbering::Mask => enumerate_ring(ctx)?,
    })
}

fn polynomial(x: &RingElement) -> String {
    CanonicalPolynomial::from_element(x).to_string()
}

fn atom_names(x: &RingElement) -> Vec<String> {
    x.atoms().iter().map(polynomial).collect()
}

pub fn ring_eval(generators: &str, expression: &str, bindings: &[String]) -> Result<Report, Failure> {
    let ctx = context(generators)?;
    let mut report = Report::new("ring eval");
    report.config("generators", ctx.names().to_vec());
    report.config("expression", expression);

    let mut bound = HashMap::new();
    let mut listed = Vec::new();
    for b in bindings {
        let (name, rhs) = b
            .split_once('=')
            .map(|(n, r)| (n.trim(), r.trim()))
            .ok_or_else(|| Failure::input(format!("binding {b:?} is not of the form NAME=EXPR")))?;
        let value = if let Some(index) = rhs.strip_prefix('@') {
            let elements = enumerate_normal_form_order(&ctx)?;
            let k: usize = index.parse().map_err(|_| Failure::input(format!("binding {b:?}: bad element index")))?;
            elements.get(k).cloned().ok_or_else(|| Failure::input(format!("binding {b:?}: ring has {} elements", elements.len())))?
        } else {
            expr::eval(&expr::parse(rhs, &ctx)?, &ctx, None)?
        };
        listed.push(format!("{name}={}", polynomial(&value)));
        bound.insert(name.to_owned(), value);
    }
    if !listed.is_empty() {
        report.config("bindings", listed);
    }

    let e = Expression::parse(expression)?;
    let value = expr::eval(&e, &ctx, Some(&bound))?;
    report.value("canonical", polynomial(&value));
    report.value("expanded", expr::expand(&e).to_string());
    report.value("cost", expr::cost(&e));
    report.value("atom_count", value.atom_count());
    report.value("atom_codes", value.atom_codes());
    report.value("atoms", atom_names(&value));
    report.value("geq_degree", value.geq_degree().to_string());
    if let Ok(elements) = enumerate_normal_form_order(&ctx) {
        if let Some(k) = elements.iter().position(|x| *x == value) {
            report.value("normal_form_index", k);
        }
    }
    Ok(report)
}

pub fn ring_table(generators: &str, numbering: Numbering) -> Result<Report, Failure> {
    let ctx = context(generators)?;
    if ctx.len() > MAX_TABLE_GENERATORS {
        return Err(Failure::input(format!(
            "ring table supports at most {MAX_TABLE_GENERATORS} generators, got {}",
            ctx.len()
        )));
    }
    let elements = numbered(&ctx, numbering)?;
    let mut report = Report::new("ring table");
    report.config("generators", ctx.names().to_vec());
    report.config("numbering", numbering.name());
    report.value("size", elements.len());

    let mut list = Table::new(["index", "element", "atoms"]);
    for (k, x) in elements.iter().enumerate() {
        list.push(vec![k.into(), x.to_string().into(), x.atom_codes().into_iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ").into()]);
    }
    report.table("elements", list);

    let index = |x: &RingElement| elements.iter().position(|e| e == x).expect("ring is closed");
    let labels: Vec<String> = (0..elements.len()).map(|k| k.to_string()).collect();
    let xor = Table::matrix("xor", &labels, &labels, |i, j| index(&elements[i].xor(&elements[j]).expect("same ring")).into());
    let and = Table::matrix("and", &labels, &labels, |i, j| index(&elements[i].and(&elements[j]).expect("same ring")).into());
    let geq = Table::matrix(">=", &labels, &labels, |i, j| {
        if elements[i].geq(&elements[j]).expect("same ring") { "+" } else { "" }.into()
    });
    report.table("xor", xor);
    report.table("and", and);
    report.table("geq", geq);
    Ok(report)
}

pub fn extract(generators: &str, relations_path: &str, list_ideal: bool) -> Result<Report, Failure> {
    let ctx = context(generators)?;
    let bytes = read_file(relations_path)?;
    let text = utf8(&bytes, relations_path)?;
    let mut report = Report::new("extract");
    report.input("relations", relations_path, &bytes);
    report.config("generators", ctx.names().to_vec());

    let relations = parse_relations(text, &ctx)?;
    report.value("relations", relations.iter().map(ToString::to_string).collect::<Vec<_>>());
    let g = principal_generator(&relations, &ctx)?;
    report.value("generator", polynomial(&g));
    report.value("generator_atoms", g.atom_count());
    report.value("ideal_size", g.geq_degree().to_string());

    let residues = relevant_characteristics(&relations, &ctx)?;
    report.value("characteristic_count", residues.len());
    // The normal-form numbering lists elements by monomial count, so the
    // first element in a residue class is a shortest representative.
    let candidates = if ctx.len() <= MAX_REPRESENTATIVE_GENERATORS { enumerate_normal_form_order(&ctx)? } else { Vec::new() };
    let mut chars = Table::new(["index", "residue", "representative"]);
    for (k, r) in residues.iter().enumerate() {
        let mut rep = String::new();
        for x in &candidates {
            if residue(x, &g)? == *r {
                rep = polynomial(x);
                break;
            }
        }
        chars.push(vec![(k + 1).into(), polynomial(r).into(), rep.into()]);
    }
    report.table("characteristics", chars);

    if list_ideal {
        if g.atom_count() > MAX_IDEAL_ATOMS {
            report.warn(format!("ideal has {} atoms; listing skipped", g.atom_count()));
        } else {
            let mut t = Table::new(["index", "element"]);
            for (k, x) in ideal_elements(&g)?.iter().enumerate() {
                t.push(vec![k.into(), polynomial(x).into()]);
            }
            report.table("ideal", t);
        }
    }
    Ok(report)
}

pub fn committor(generators: Option<&str>, graph_path: Option<&str>, exact: bool) -> Result<Report, Failure> {
    let mut report = Report::new("committor");
    let graph = match (generators, graph_path) {
        (Some(gens), None) => {
            let ctx = context(gens)?;
            report.config("generators", ctx.names().to_vec());
            report.config("source", "order graph of the nonzero ring elements");
            build_graph(&ctx)?
        }
        (None, Some(path)) => {
            let bytes = read_file(path)?;
            report.input("graph", path, &bytes);
            report.config("source", "graph file");
            ComparisonGraph::from_json(utf8(&bytes, path)?)?
        }
        _ => return Err(Failure::input("give exactly one of --generators and --graph")),
    };
    report.config("arithmetic", if exact { "exact rational" } else { "f64" });

    let labels = graph.labels().to_vec();
    let l = laplacian::<f64>(&graph);
    report.table("laplacian", Table::matrix("L", &labels, &labels, |i, j| Value::Int(l[(i, j)] as i64)));
    let sink_ids = sinks(&graph);
    let sink_labels: Vec<String> = sink_ids.iter().map(|&s| labels[s].clone()).collect();
    report.value("sinks", sink_labels.clone());

    let q: Vec<Vec<f64>> = committors(&graph)?;
    let table = if exact {
        let qe: Vec<Vec<Rational>> = committors(&graph)?;
        Table::matrix("vertex", &labels, &sink_labels, |i, c| qe[c][i].to_string().into())
    } else {
        Table::matrix("vertex", &labels, &sink_labels, |i, c| q[c][i].into())
    };
    report.table("committors", table);
    report.table("representativeness_percent", Table::matrix("vertex", &labels, &sink_labels, |i, c| (100.0 * q[c][i]).into()));

    let worst = (0..labels.len()).map(|i| (q.iter().map(|c| c[i]).sum::<f64>() - 1.0).abs()).fold(0.0, f64::max);
    report.value("max_sum_defect", worst);
    Ok(report)
}

pub fn sort(ratings_path: &str) -> Result<Report, Failure> {
    let bytes = read_file(ratings_path)?;
    let text = utf8(&bytes, ratings_path)?;
    let mut report = Report::new("sort");
    report.input("ratings", ratings_path, &bytes);

    let csv = read_labelled_csv(text, ratings_path)?;
    let n = csv.rows.len();
    let labels: Vec<String> = csv.rows.iter().map(|(l, _)| l.clone()).collect();
    if csv.columns != labels {
        return Err(Failure::input(format!("{ratings_path}: column labels must repeat the row labels in order")));
    }
    let diagonal_given = csv.rows.iter().enumerate().filter(|(i, (_, cells))| !cells[*i].is_empty()).count();
    if diagonal_given != 0 && diagonal_given != n {
        return Err(Failure::input(format!("{ratings_path}: give either all diagonal entries or none")));
    }
    let mut m = DenseMatrix::<f64>::zeros(n, n);
    for (i, (label, cells)) in csv.rows.iter().enumerate() {
        for (j, cell) in cells.iter().enumerate() {
            if i == j && cell.is_empty() {
                continue;
            }
            m[(i, j)] = parse_number(cell, ratings_path, label, &csv.columns[j])?;
        }
    }
    let r = if diagonal_given == 0 { RatingMatrix::assemble(&m)? } else { RatingMatrix::from_matrix(&m)? };
    report.config("assembly", if diagonal_given == 0 { "diagonal filled to the largest row sum" } else { "complete matrix as given" });
    report.config("row_sum_target", r.row_sum_target());

    let s = sort_objects(&r)?;
    report.config(
        "orientation",
        if s.flipped { "vec replaced by 1 - vec so that its first entry off 1/2 exceeds 1/2" } else { "vec as computed; its first entry off 1/2 exceeds 1/2" },
    );
    report.table("ratings", Table::matrix("R", &labels, &labels, |i, j| r.entries()[(i, j)].into()));
    let mut ev = Table::new(["index", "re", "im"]);
    for (k, z) in s.schur.eigenvalues.iter().enumerate() {
        ev.push(vec![k.into(), z.re.into(), z.im.into()]);
    }
    report.table("eigenvalues", ev);
    let mut vec = Table::new(["object", "vec", "u2"]);
    for (i, label) in labels.iter().enumerate() {
        vec.push(vec![label.clone().into(), s.vec[i].into(), s.u2[i].into()]);
    }
    report.table("membership", vec);
    report.value("sorted_row", s.order.iter().map(|&i| labels[i].clone()).collect::<Vec<_>>());
    let clusters = ["cluster 1".to_owned(), "cluster 2".to_owned()];
    report.table("rc", Table::matrix("Rc", &clusters, &clusters, |i, j| s.rc[(i, j)].into()));
    report.value("fiedler_positive", s.fiedler_cut.0.iter().map(|&i| labels[i].clone()).collect::<Vec<_>>());
    report.value("fiedler_nonpositive", s.fiedler_cut.1.iter().map(|&i| labels[i].clone()).collect::<Vec<_>>());
    report.value("v11", s.v11);
    report.value("v12", s.v12);
    report.value("v22", s.v22);
    let sym = symmetrize_check(&s, &r)?;
    report.value("symmetry_defect", format!("{:.3e}", sym.symmetry_defect));
    report.value("formula_defect", format!("{:.3e}", sym.formula_defect));
    Ok(report)
}

pub fn weights(coding_path: &str, coords_path: &str, scale: f64) -> Result<Report, Failure> {
    let coding_bytes = read_file(coding_path)?;
    let coords_bytes = read_file(coords_path)?;
    let mut report = Report::new("weights");
    report.input("coding", coding_path, &coding_bytes);
    report.input("coords", coords_path, &coords_bytes);
    report.config("scale", scale);

    let coding_csv = read_labelled_csv(utf8(&coding_bytes, coding_path)?, coding_path)?;
    let objects: Vec<String> = coding_csv.rows.iter().map(|(l, _)| l.clone()).collect();
    let mut bits = Vec::with_capacity(objects.len());
    for (label, cells) in &coding_csv.rows {
        let row = cells
            .iter()
            .zip(&coding_csv.columns)
            .map(|(c, col)| match c.as_str() {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(Failure::input(format!("{coding_path}: row {label:?}, column {col:?}: {other:?} is not 0 or 1"))),
            })
            .collect::<Result<Vec<bool>, _>>()?;
        bits.push(row);
    }
    let coding = FeatureCoding::new(objects.clone(), coding_csv.columns.clone(), bits)?;

    let coords_csv = read_labelled_csv(utf8(&coords_bytes, coords_path)?, coords_path)?;
    let mut coord_labels: Vec<&String> = coords_csv.rows.iter().map(|(l, _)| l).collect();
    let mut object_labels: Vec<&String> = objects.iter().collect();
    coord_labels.sort();
    object_labels.sort();
    if coord_labels != object_labels {
        return Err(Failure::input(format!("{coords_path}: object labels do not match {coding_path}")));
    }
    let d = coords_csv.columns.len();
    let mut coords = DenseMatrix::<f64>::zeros(objects.len(), d);
    for (i, obj) in objects.iter().enumerate() {
        let (_, cells) = coords_csv.rows.iter().find(|(l, _)| l == obj).expect("labels checked");
        for (j, cell) in cells.iter().enumerate() {
            coords[(i, j)] = parse_number(cell, coords_path, obj, &coords_csv.columns[j])?;
        }
    }

    let targets = similarity_targets(&coords, scale)?;
    let features = commonality_features(&coding)?;
    let model = fit_weights(&features, &targets)?;

    let mut w = Table::new(["characteristic", "weight", "status"]);
    for (name, weight) in coding.characteristics().iter().zip(&model.weights) {
        match weight {
            Some(x) => w.push(vec![name.clone().into(), (*x).into(), "learned".into()]),
            None => w.push(vec![name.clone().into(), "".into(), "unlearned".into()]),
        }
    }
    report.table("weights", w);

    let mut pairs = Table::new(["pair", "shared", "intended", "trained"]);
    for ((&(j, k), row), t) in features.pairs.iter().zip(&features.rows).zip(&targets) {
        let shared: String = row.iter().map(|b| if *b { '1' } else { '0' }).collect();
        let trained = predict(&model, row)?;
        pairs.push(vec![format!("{}-{}", objects[j], objects[k]).into(), shared.into(), (*t).into(), trained.into()]);
    }
    report.table("pairs", pairs);
    report.value("residual_norm", model.residual_norm);
    let kkt = model
        .weights
        .iter()
        .flatten()
        .zip(&model.gradient)
        .map(|(w, g)| (w * g).abs().max(-g))
        .fold(0.0, f64::max);
    report.value("kkt_defect", format!("{kkt:.3e}"));
    for (c, w) in model.weights.iter().enumerate() {
        if w.is_none() {
            report.warn(format!("characteristic {:?} is shared by no pair; its weight is not learned", coding.characteristics()[c]));
        }
    }
    Ok(report)
}
