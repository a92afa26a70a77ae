#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use reslab::counting::{CountQuery, CountTag};
use reslab::multilinear::Restriction;
use reslab::{rank_and_classify, FreqTuple, FreqVector, SpectralField};

pub fn v(c: &[i64]) -> FreqVector {
    FreqVector::new(c).unwrap()
}

pub fn cube(d: usize, half: i64) -> Vec<FreqVector> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (-half..=half).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out.iter().map(|c| v(c)).collect()
}

fn in_ball(n: &FreqVector, c: &FreqVector, r: f64) -> bool {
    ((*n - *c).norm2() as f64) <= r * r
}

fn ball(c: &FreqVector, r: f64) -> Vec<FreqVector> {
    cube(c.dim(), r.floor() as i64)
        .into_iter()
        .map(|o| *c + o)
        .filter(|n| in_ball(n, c, r))
        .collect()
}

fn l1_ok(a: i64, b: i64, r: f64) -> bool {
    ((a.abs() + b.abs()) as f64) <= r
}

fn sq(n: &FreqVector) -> i64 {
    n.norm2()
}

/// Literal predicate check of every constraint of `q.tag` for one candidate
/// tuple (entries in slot order).
fn admissible(q: &CountQuery, n: &[FreqVector]) -> bool {
    let (ns, mu) = (q.n_star, q.mu_star);
    match q.tag {
        CountTag::NumberA => in_ball(&n[0], &q.ball_center, q.radius) && sq(&(n[0] - ns)) == mu,
        CountTag::NumberB => {
            let m = n[0] - ns;
            in_ball(&n[0], &q.ball_center, q.radius) && m.coord(0).pow(2) + 3 * m.coord(1).pow(2) == mu
        }
        CountTag::C1plus => {
            n[0] + n[1] + n[2] == ns
                && sq(&n[0]) + sq(&n[1]) + sq(&n[2]) == mu
                && l1_ok((n[0] - q.n_sub).coord(0), n[1].coord(0), q.radius)
        }
        CountTag::Cdplus => n[0] + n[1] == ns && sq(&n[0]) + sq(&n[1]) == mu && in_ball(&n[0], &q.n_sub, q.radius),
        CountTag::Cdprimeplus => {
            let zero = FreqVector::zero(q.d);
            n[0] + n[1] + n[2] == ns
                && sq(&n[0]) + sq(&n[1]) + sq(&n[2]) == mu
                && in_ball(&n[0], &zero, q.r1)
                && in_ball(&n[1], &zero, q.r2)
        }
        CountTag::L1minus1 | CountTag::L1minus2 => {
            let (a, b) = if q.tag == CountTag::L1minus1 { (0, 2) } else { (0, 1) };
            n[0] - n[1] + n[2] == ns
                && sq(&n[0]) - sq(&n[1]) + sq(&n[2]) == mu
                && n[1] != n[0]
                && n[1] != n[2]
                && l1_ok(n[a].coord(0), n[b].coord(0), q.radius)
        }
        CountTag::Ldminus => n[0] - n[1] == ns && sq(&n[0]) - sq(&n[1]) == mu && in_ball(&n[0], &q.n_sub, q.radius),
        CountTag::Ldprime1 | CountTag::Ldprime2 | CountTag::Ldprime => {
            let zero = FreqVector::zero(q.d);
            let radii_ok = if q.tag == CountTag::Ldprime2 {
                in_ball(&n[0], &zero, q.r1) && in_ball(&n[1], &zero, q.r2)
            } else {
                in_ball(&n[0], &zero, q.r1) && in_ball(&n[2], &zero, q.r3)
            };
            let excl = q.tag == CountTag::Ldprime || (n[1] != n[0] && n[1] != n[2]);
            n[0] - n[1] + n[2] == ns && sq(&n[0]) - sq(&n[1]) + sq(&n[2]) == mu && radii_ok && excl
        }
    }
}

/// Ranges of the two enumerated variables of each lemma, by slot; the
/// remaining slot (if any) is solved from the linear constraint.
fn plan(q: &CountQuery) -> (Vec<(usize, Vec<FreqVector>)>, Option<usize>) {
    let zero = FreqVector::zero(q.d);
    let r = q.radius;
    let line = |c: i64, half: i64| (c - half..=c + half).map(|x| v(&[x])).collect::<Vec<_>>();
    let rf = r.floor() as i64;
    match q.tag {
        CountTag::NumberA | CountTag::NumberB => (vec![(0, ball(&q.ball_center, r))], None),
        CountTag::C1plus => (vec![(0, line(q.n_sub.coord(0), rf)), (1, line(0, rf))], Some(2)),
        CountTag::Cdplus | CountTag::Ldminus => (vec![(0, ball(&q.n_sub, r))], Some(1)),
        CountTag::Cdprimeplus => (vec![(0, ball(&zero, q.r1)), (1, ball(&zero, q.r2))], Some(2)),
        CountTag::L1minus1 => (vec![(0, line(0, rf)), (2, line(0, rf))], Some(1)),
        CountTag::L1minus2 => (vec![(0, line(0, rf)), (1, line(0, rf))], Some(2)),
        CountTag::Ldprime1 | CountTag::Ldprime => (vec![(0, ball(&zero, q.r1)), (2, ball(&zero, q.r3))], Some(1)),
        CountTag::Ldprime2 => (vec![(0, ball(&zero, q.r1)), (1, ball(&zero, q.r2))], Some(2)),
    }
}

fn solve_slot(q: &CountQuery, slots: &mut [FreqVector], free: usize) {
    let ns = q.n_star;
    slots[free] = match (q.tag, free) {
        (CountTag::C1plus | CountTag::Cdprimeplus, 2) => ns - slots[0] - slots[1],
        (CountTag::Cdplus, 1) => ns - slots[0],
        (CountTag::Ldminus, 1) => slots[0] - ns,
        (_, 1) => slots[0] + slots[2] - ns,
        (_, 2) => ns - slots[0] + slots[1],
        _ => unreachable!(),
    };
}

/// Enumerates the product of the constraining ranges, nested in `order`
/// (`false`: first variable outermost), solving the linear constraint for the
/// remaining slot and checking every constraint literally.
pub fn naive_count(q: &CountQuery, reversed: bool) -> u64 {
    let (mut vars, free) = plan(q);
    if reversed {
        vars.reverse();
    }
    let width = match q.tag {
        CountTag::NumberA | CountTag::NumberB => 1,
        CountTag::Cdplus | CountTag::Ldminus => 2,
        _ => 3,
    };
    let mut slots = vec![FreqVector::zero(q.d); width];
    let mut count = 0;
    let outer = &vars[0];
    let single = [FreqVector::zero(q.d)];
    for a in &outer.1 {
        slots[outer.0] = *a;
        let inner: &[FreqVector] = vars.get(1).map_or(&single[..], |x| &x.1);
        for b in inner {
            if let Some(x) = vars.get(1) {
                slots[x.0] = *b;
            }
            if let Some(f) = free {
                solve_slot(q, &mut slots, f);
            }
            if admissible(q, &slots) {
                count += 1;
            }
        }
    }
    count
}

pub fn random_vector<R: Rng>(rng: &mut R, d: usize, half: i64) -> FreqVector {
    let c: Vec<i64> = (0..d).map(|_| rng.random_range(-half..=half)).collect();
    v(&c)
}

/// Field with `sites` random points of the box and small Gaussian-integer amplitudes.
pub fn random_int_field<R: Rng>(rng: &mut R, d: usize, box_radius: i64, sites: usize) -> SpectralField {
    let mut f = SpectralField::new(d, box_radius).unwrap();
    for _ in 0..sites {
        let n = random_vector(rng, d, box_radius);
        let a = Complex64::new(rng.random_range(-3..=3) as f64, rng.random_range(-3..=3) as f64);
        f.insert(n, a).unwrap();
    }
    f
}

/// Every tuple of the product of supports, with its output, level and class.
pub fn naive_restricted(
    fields: &[SpectralField],
    mu: Option<i64>,
    restriction: Restriction,
) -> SpectralField {
    let d = fields[0].dim();
    let k = (fields.len() - 1) / 2;
    let out_box: i64 = fields.iter().map(|f| f.box_radius()).sum();
    let supports: Vec<Vec<(FreqVector, Complex64)>> =
        fields.iter().map(|f| f.iter().map(|(n, a)| (*n, *a)).collect()).collect();
    let mut acc: std::collections::BTreeMap<FreqVector, Complex64> = Default::default();
    let mut stack: Vec<usize> = vec![0; fields.len()];
    if supports.iter().any(|s| s.is_empty()) {
        return SpectralField::new(d, out_box).unwrap();
    }
    loop {
        let entries: Vec<FreqVector> = stack.iter().enumerate().map(|(l, &i)| supports[l][i].0).collect();
        let amp: Complex64 = stack.iter().enumerate().map(|(l, &i)| supports[l][i].1).product();
        let mut n = FreqVector::zero(d);
        let mut quad = 0;
        for (l, e) in entries.iter().enumerate() {
            if l % 2 == 0 {
                n = n + *e;
                quad += e.norm2();
            } else {
                n = n - *e;
                quad -= e.norm2();
            }
        }
        let level = n.norm2() - quad;
        let keep_level = mu.is_none_or(|m| m == level);
        let keep_class = match restriction {
            Restriction::None => true,
            r => {
                let inside = rank_and_classify(&FreqTuple::new(entries.clone()).unwrap(), d, k).unwrap().class.in_a();
                (r == Restriction::OnA) == inside
            }
        };
        if keep_level && keep_class {
            *acc.entry(n).or_default() += amp;
        }
        let mut j = stack.len();
        loop {
            if j == 0 {
                let mut f = SpectralField::new(d, out_box).unwrap();
                for (n, a) in acc {
                    f.insert(n, a).unwrap();
                }
                return f;
            }
            j -= 1;
            stack[j] += 1;
            if stack[j] < supports[j].len() {
                break;
            }
            stack[j] = 0;
        }
    }
}
