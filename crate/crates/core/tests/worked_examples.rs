//! Small instances whose answers are known by hand.

use linf_equilateral::block_sum::build_parts;
use linf_equilateral::blocks::block_pivot;
use linf_equilateral::certify::{exhaustive_pivot_oracle, linf_distance, verify_certificate, OracleMode};
use linf_equilateral::orthant::build_w2;
use linf_equilateral::perturb::{pairs, EpsMatrix, FixedPointSystem};
use linf_equilateral::pivot::{max_det_columns, search_orthant_config, ColumnSelection};
use linf_equilateral::polytope::embed;
use linf_equilateral::rational::{ints, q};
use linf_equilateral::window::{build_w1, window_index};
use linf_equilateral::*;

fn spec(rows: &[&[i64]]) -> SubspaceSpec {
    SubspaceSpec::from_rows(rows.iter().map(|r| ints(r)).collect()).unwrap()
}

fn opts() -> ConstructOptions {
    ConstructOptions::default()
}

#[test]
fn determinants() {
    assert_eq!(Mat::from_rows(vec![vec![q(5, 3)]]).unwrap().det().unwrap(), q(5, 3));
    assert_eq!(Mat::identity(2).det().unwrap(), q(1, 1));
    assert_eq!(Mat::from_i64(2, 2, &[1, 2, 3, 4]).unwrap().det().unwrap(), q(-2, 1));
    let m = Mat::from_i64(2, 3, &[1, 2, 3, 2, 4, 6]).unwrap();
    assert_eq!(m.rank(), 1);
    assert_eq!(Mat::zeros(3, 2).rank(), 0);
}

#[test]
fn column_replacement_and_cramer() {
    let i2 = Mat::identity(2);
    let r = i2.replace_column(1, &ints(&[0, 1])).unwrap();
    assert_eq!(r, Mat::from_i64(2, 2, &[1, 0, 0, 1]).unwrap());
    let b = Mat::from_i64(2, 2, &[1, 1, 1, -1]).unwrap();
    assert_eq!(b.replace_column(0, &b.column(0)).unwrap(), b);
    assert_eq!(b.cramer_solve(&ints(&[0, 2])).unwrap(), ints(&[1, -1]));
    assert_eq!(Mat::from_i64(1, 1, &[2]).unwrap().cramer_solve(&ints(&[3])).unwrap(), vec![q(3, 2)]);
    assert_eq!(Mat::identity(3).cramer_solve(&ints(&[4, 5, 6])).unwrap(), ints(&[4, 5, 6]));
}

#[test]
fn determinant_is_multilinear_in_a_column() {
    let b = Mat::from_rows(vec![
        vec![q(1, 2), q(3, 1), q(-1, 3)],
        vec![q(2, 1), q(0, 1), q(5, 4)],
        vec![q(-7, 5), q(1, 1), q(2, 1)],
    ])
    .unwrap();
    let u = vec![q(1, 1), q(-2, 3), q(4, 1)];
    let w = vec![q(0, 1), q(5, 2), q(-1, 1)];
    let (a, c) = (q(3, 7), q(-2, 1));
    for i in 0..3 {
        let mix: Vec<Rational> = u.iter().zip(&w).map(|(x, y)| &a * x + &c * y).collect();
        let lhs = b.replace_column(i, &mix).unwrap().det().unwrap();
        let rhs = &a * &b.replace_column(i, &u).unwrap().det().unwrap()
            + &c * &b.replace_column(i, &w).unwrap().det().unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn pivot_examples() {
    let s = spec(&[&[1, 1, 1, 1]]);
    let p = max_det_columns(&s, 1000).unwrap();
    assert_eq!((p.columns.clone(), p.abs_det()), (vec![0], q(1, 1)));
    let p = max_det_columns(&spec(&[&[1, 0, 0], &[0, 1, 2]]), 1000).unwrap();
    assert_eq!((p.columns.clone(), p.abs_det()), (vec![0, 2], q(2, 1)));
    let best = exhaustive_pivot_oracle(&spec(&[&[1, -5, 3, 2]]), OracleMode::Columns).unwrap();
    assert_eq!(best.abs_det, q(5, 1));
}

#[test]
fn orthant_examples() {
    let s = spec(&[&[1, 1, 1, 1]]);
    let cfg = search_orthant_config(&s, 1, 1000).unwrap();
    assert_eq!(cfg.groups, vec![vec![3]]);
    assert_eq!(cfg.sigma.as_slice(), &[1, 1, 1, 1]);
    assert_eq!(cfg.det, q(1, 1));
    assert_eq!(build_w2(&s, &cfg, &[1]).unwrap().coords, ints(&[0, -1, 0, 1]));

    let s = spec(&[&[1, 1, 0, 0, 0, 0], &[0, 0, 1, 1, 1, 1]]);
    let cfg = search_orthant_config(&s, 2, 1000).unwrap();
    for j in linf_equilateral::combin::subsets_up_to(&cfg.free(), 2) {
        let w = build_w2(&s, &cfg, &j).unwrap();
        assert!(w.group_values.iter().all(|y| y.abs() <= q(1, 1)));
    }
}

#[test]
fn sign_window_examples() {
    let s = spec(&[&[1, 1, 1, 1]]);
    let pivot = ColumnSelection::for_spec(&s, vec![3]).unwrap();
    assert_eq!(build_w1(&s, &pivot, &[0, 1, 2]).unwrap().coords, ints(&[1, 1, 1, -3]));
    let w = build_w1(&s, &pivot, &[0]).unwrap();
    assert_eq!(w.coords, ints(&[1, -1, -1, 1]));
    assert_eq!(w.coords[..3].iter().filter(|v| v.is_positive()).count(), w.j.len());

    let mut tails: Vec<Rational> = linf_equilateral::combin::subsets_up_to(&[0, 1, 2], 3)
        .into_iter()
        .chain(std::iter::once(vec![]))
        .map(|j| build_w1(&s, &pivot, &j).unwrap().coords[3].clone())
        .collect();
    tails.sort();
    assert_eq!(tails, ints(&[-3, -1, -1, -1, 1, 1, 1, 3]));
    assert_eq!(window_index(&q(3, 1), 3), 2);
    assert_eq!(window_index(&q(-3, 1), 3), 0);

    let cert = construct_bound1(&s, &opts()).unwrap();
    assert!(cert.len() >= 3);
    assert!(verify_certificate(&cert, Some(&s)).valid);
    assert_eq!(linf_distance(&ints(&[1, 1, 1, -3]), &ints(&[1, -1, -1, 1])).unwrap(), q(4, 1));
}

#[test]
fn orthant_split_on_all_ones_rows() {
    for n in 2..10 {
        let s = SubspaceSpec::from_rows(vec![vec![q(1, 1); n]]).unwrap();
        let cert = construct_bound2(&s, 1, &opts()).unwrap();
        assert_eq!(cert.len(), n);
        assert!(cert.points.contains(&vec![q(0, 1); n]));
        assert!(verify_certificate(&cert, Some(&s)).valid);
    }
}

#[test]
fn block_sum_examples() {
    let s = spec(&[&[1, 1, 1, 1]]);
    let pivot = block_pivot(&s, 2, 1000).unwrap();
    assert!(!pivot.degenerate);
    assert_eq!(pivot.blocks.iter().map(|b| b.cols.clone()).collect::<Vec<_>>(), vec![vec![2], vec![3]]);
    let (w, z) = build_parts(&s, &pivot, &[0], 0).unwrap();
    assert_eq!(w, vec![q(-1, 2), q(0, 1), q(0, 1), q(1, 2)]);
    assert_eq!(z, vec![q(-1, 2), q(0, 1), q(1, 2), q(0, 1)]);

    let cert = construct_bound3(&s, 1, &opts()).unwrap();
    let half = q(1, 2);
    assert_eq!(
        cert.points,
        vec![
            vec![q(-1, 1), q(0, 1), half.clone(), half.clone()],
            vec![q(0, 1), q(-1, 1), half.clone(), half],
            vec![q(0, 1); 4],
        ]
    );
    assert_eq!(linf_distance(&cert.points[0], &cert.points[1]).unwrap(), q(1, 1));
}

#[test]
fn degenerate_block_ranks() {
    // only one nonzero column: the second block has rank 0
    let s = spec(&[&[0, 0, 1, 0, 0]]);
    let p = block_pivot(&s, 2, 1000).unwrap();
    assert!(p.degenerate);
    assert_eq!(p.blocks.iter().map(|b| b.size()).collect::<Vec<_>>(), vec![1, 0]);
    let cert = construct_bound3(&s, 1, &opts()).unwrap();
    assert_eq!(cert.len(), 4);
    assert!(verify_certificate(&cert, Some(&s)).valid);

    // a zero in a block slot is swapped away when a usable column exists
    let s = spec(&[&[1, 1, 1, 0, 1]]);
    let p = block_pivot(&s, 2, 1000).unwrap();
    assert!(!p.degenerate);
    assert!(p.blocks.iter().all(|b| b.size() == 1 && !b.det.is_zero()));
}

#[test]
fn bounds_examples() {
    let t = bounds_table(9, 2).unwrap();
    let row = t.best_for(Bound::OrthantSplit).unwrap();
    assert_eq!((row.ell, row.raw.clone()), (Some(2), q(17, 2)));
    assert_eq!((t.winner().bound, t.winner().ell), (Bound::OrthantSplit, Some(2)));
    let t = bounds_table(15, 3).unwrap();
    let two = t.rows.iter().find(|r| r.bound == Bound::OrthantSplit && r.ell == Some(2)).unwrap();
    assert_eq!(two.raw, q(49, 4));
    let t = bounds_table(4, 1).unwrap();
    assert_eq!(t.best_for(Bound::SignWindows).unwrap().raw, q(8, 3));
}

#[test]
fn polytope_examples() {
    let cube = PolytopeSpec {
        d: 3,
        normals: vec![ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1])],
    };
    let section = embed(&cube).unwrap();
    assert_eq!(section.codim(), 0);
    let r = petty_certificate(&cube, &opts()).unwrap();
    assert_eq!(r.certificate.len(), 8);
    assert!(r.petty);

    let s = q(13, 15);
    let hexagon = PolytopeSpec {
        d: 2,
        normals: vec![vec![q(1, 1), q(0, 1)], vec![q(1, 2), s.clone()], vec![q(-1, 2), s]],
    };
    let section = embed(&hexagon).unwrap();
    let a = section.a.clone();
    assert_eq!(a.rows(), 1);
    assert!(a.mul(&section.u).unwrap().is_zero());
    for i in 0..20 {
        let x = vec![q(i - 7, 3), q(11 - 2 * i, 5)];
        assert_eq!(hexagon.norm(&x), section.lift(&x).unwrap().iter().map(Rational::abs).fold(q(0, 1), Rational::max));
    }

    let p = linf_equilateral::gen::random_polytope(6, 7, 11);
    let r = petty_certificate(&p, &opts()).unwrap();
    assert!(r.petty && r.certificate.len() >= 7);
}

#[test]
fn fixed_point_examples() {
    let s = SubspaceSpec::from_rows(vec![vec![q(1, 1); 7]]).unwrap();
    let sys = FixedPointSystem::new(&s, 1, 1000).unwrap();
    assert_eq!(sys.size(), 4);
    let mut eps = EpsMatrix::zeros(4);
    for (t, (i, j)) in pairs(4).into_iter().enumerate() {
        eps.set(i, j, q(t as i64, 40));
    }
    let pts = sys.points(&eps);
    for (i, j) in pairs(4) {
        assert_eq!(linf_distance(&pts[i], &pts[j]).unwrap(), q(1, 1) + eps.get(i, j));
    }
    for (j, p) in pts.iter().enumerate() {
        assert_eq!(*p, sys.build_p(&eps, j).unwrap());
        assert!(s.contains(p).unwrap());
    }
}
