//! Matrix exponential by scaling and squaring with a degree-13 Padé approximant.

use super::lu::Lu;
use super::matrix::{ComplexMatrix, C64};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

fn one_norm(m: &ComplexMatrix) -> f64 {
    (0..m.cols())
        .map(|j| (0..m.rows()).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn lin(terms: &[(f64, &ComplexMatrix)], n: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(n, n);
    for (c, m) in terms {
        out.axpy(C64::new(*c, 0.0), m);
    }
    out
}

pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    assert!(a.is_square());
    let n = a.rows();
    let nrm = one_norm(a);
    let s = if nrm > THETA13 {
        (nrm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.scale_real(0.5f64.powi(s));
    let b = &PADE13;
    let id = ComplexMatrix::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let inner_u = lin(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], n);
    let mut u = a6.matmul(&inner_u);
    u.axpy(C64::new(1.0, 0.0), &lin(&[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], &id)], n));
    let u = a.matmul(&u);
    let inner_v = lin(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], n);
    let mut v = a6.matmul(&inner_v);
    v.axpy(C64::new(1.0, 0.0), &lin(&[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], &id)], n));
    let p = &v + &u;
    let q = &v - &u;
    let lu = Lu::factor(&q, 0.0);
    let mut r = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let col = lu.solve(&p.column(j));
        for i in 0..n {
            r[(i, j)] = col[i];
        }
    }
    for _ in 0..s {
        r = r.matmul(&r);
    }
    r
}
