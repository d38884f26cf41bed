//! Analytic overlap, kinetic, nuclear-attraction and electron-repulsion
//! integrals over contracted Cartesian s/p Gaussians (McMurchie–Davidson).

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::basis::{ao_functions, build_shells, AoFunction, BasisName, BasisShell};
use super::bundle::AOBundle;
use super::eri::{pair_index, PackedEri};
use super::geometry::Molecule;
use super::hermite::{Hermite1D, HermiteR};
use crate::par;
use crate::Result;

/// Cartesian exponent triples of a shell's components.
fn components(l: usize) -> &'static [[usize; 3]] {
    const S: [[usize; 3]; 1] = [[0, 0, 0]];
    const P: [[usize; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    match l {
        0 => &S,
        _ => &P,
    }
}

/// Hermite expansion of one component pair of one primitive pair.
#[derive(Clone, Copy, Default)]
struct Terms {
    n: usize,
    tuv: [[usize; 3]; 4],
    c: [f64; 4],
}

struct PrimPair {
    p: f64,
    center: [f64; 3],
    /// One entry per (component of a, component of b), row-major.
    terms: Vec<Terms>,
}

struct ShellPair {
    a: usize,
    b: usize,
    la: usize,
    lb: usize,
    prims: Vec<PrimPair>,
}

fn gaussian_product(a: f64, ra: [f64; 3], b: f64, rb: [f64; 3]) -> (f64, [f64; 3], f64) {
    let p = a + b;
    let mu = a * b / p;
    let mut center = [0.0; 3];
    let mut r2 = 0.0;
    for k in 0..3 {
        center[k] = (a * ra[k] + b * rb[k]) / p;
        r2 += (ra[k] - rb[k]).powi(2);
    }
    (p, center, (-mu * r2).exp())
}

fn hermite_xyz(
    la: usize,
    lb_max: usize,
    p: f64,
    center: [f64; 3],
    ra: [f64; 3],
    rb: [f64; 3],
    k: f64,
) -> [Hermite1D; 3] {
    // The exponential prefactor is carried by the x direction only.
    [0, 1, 2].map(|d| {
        Hermite1D::new(
            la,
            lb_max,
            p,
            center[d] - ra[d],
            center[d] - rb[d],
            if d == 0 { k } else { 1.0 },
        )
    })
}

fn shell_pair(shells: &[BasisShell], a: usize, b: usize) -> ShellPair {
    let sa = &shells[a];
    let sb = &shells[b];
    let (la, lb) = (sa.angular_momentum, sb.angular_momentum);
    let mut prims = Vec::with_capacity(sa.exponents.len() * sb.exponents.len());
    for (i, &ea) in sa.exponents.iter().enumerate() {
        for (j, &eb) in sb.exponents.iter().enumerate() {
            let (p, center, k) = gaussian_product(ea, sa.center, eb, sb.center);
            let e = hermite_xyz(la, lb, p, center, sa.center, sb.center, k);
            let coef = sa.contraction_coefficients[i] * sb.contraction_coefficients[j];
            let mut terms = Vec::with_capacity(9);
            for ca in components(la) {
                for cb in components(lb) {
                    let mut t = Terms::default();
                    for tx in 0..=ca[0] + cb[0] {
                        for ty in 0..=ca[1] + cb[1] {
                            for tz in 0..=ca[2] + cb[2] {
                                let c = e[0].get(ca[0], cb[0], tx)
                                    * e[1].get(ca[1], cb[1], ty)
                                    * e[2].get(ca[2], cb[2], tz);
                                t.tuv[t.n] = [tx, ty, tz];
                                t.c[t.n] = coef * c;
                                t.n += 1;
                            }
                        }
                    }
                    terms.push(t);
                }
            }
            prims.push(PrimPair { p, center, terms });
        }
    }
    ShellPair { a, b, la, lb, prims }
}

/// Overlap, kinetic and nuclear-attraction blocks for shells `a`, `b`.
fn one_electron_block(
    shells: &[BasisShell],
    a: usize,
    b: usize,
    nuclei: &[([f64; 3], f64)],
    want_nuclear: bool,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let sa = &shells[a];
    let sb = &shells[b];
    let (la, lb) = (sa.angular_momentum, sb.angular_momentum);
    let ca = components(la);
    let cb = components(lb);
    let nblk = ca.len() * cb.len();
    let mut s = vec![0.0; nblk];
    let mut t = vec![0.0; nblk];
    let mut v = vec![0.0; nblk];
    for (i, &ea) in sa.exponents.iter().enumerate() {
        for (j, &eb) in sb.exponents.iter().enumerate() {
            let coef = sa.contraction_coefficients[i] * sb.contraction_coefficients[j];
            let (p, center, k) = gaussian_product(ea, sa.center, eb, sb.center);
            let e = hermite_xyz(la, lb + 2, p, center, sa.center, sb.center, k);
            let sp = (PI / p).sqrt();
            // 1D overlaps S_d(i, j) including √(π/p).
            let s1 = |d: usize, ii: usize, jj: usize| e[d].get(ii, jj, 0) * sp;
            // 1D kinetic −½ ⟨i| d²/dx² |j⟩.
            let t1 = |d: usize, ii: usize, jj: usize| {
                let mut r = -2.0 * eb * (2 * jj + 1) as f64 * s1(d, ii, jj)
                    + 4.0 * eb * eb * s1(d, ii, jj + 2);
                if jj >= 2 {
                    r += (jj * (jj - 1)) as f64 * s1(d, ii, jj - 2);
                }
                -0.5 * r
            };
            let rn: Vec<HermiteR> = if want_nuclear {
                nuclei
                    .iter()
                    .map(|(rc, _)| {
                        HermiteR::new(
                            la + lb,
                            p,
                            [center[0] - rc[0], center[1] - rc[1], center[2] - rc[2]],
                        )
                    })
                    .collect()
            } else {
                Vec::new()
            };
            for (x, ua) in ca.iter().enumerate() {
                for (y, ub) in cb.iter().enumerate() {
                    let idx = x * cb.len() + y;
                    let sx = s1(0, ua[0], ub[0]);
                    let sy = s1(1, ua[1], ub[1]);
                    let sz = s1(2, ua[2], ub[2]);
                    s[idx] += coef * sx * sy * sz;
                    let tk = t1(0, ua[0], ub[0]) * sy * sz
                        + sx * t1(1, ua[1], ub[1]) * sz
                        + sx * sy * t1(2, ua[2], ub[2]);
                    t[idx] += coef * tk;
                    if want_nuclear {
                        let mut acc = 0.0;
                        for (r, (_, z)) in rn.iter().zip(nuclei) {
                            let mut sum = 0.0;
                            for tx in 0..=ua[0] + ub[0] {
                                for ty in 0..=ua[1] + ub[1] {
                                    for tz in 0..=ua[2] + ub[2] {
                                        sum += e[0].get(ua[0], ub[0], tx)
                                            * e[1].get(ua[1], ub[1], ty)
                                            * e[2].get(ua[2], ub[2], tz)
                                            * r.r[tx][ty][tz];
                                    }
                                }
                            }
                            acc -= z * sum;
                        }
                        v[idx] += coef * 2.0 * PI / p * acc;
                    }
                }
            }
        }
    }
    (s, t, v)
}

fn ao_offsets(shells: &[BasisShell]) -> Vec<usize> {
    let mut off = Vec::with_capacity(shells.len() + 1);
    let mut n = 0;
    for s in shells {
        off.push(n);
        n += s.n_functions();
    }
    off.push(n);
    off
}

/// Rectangular overlap matrix ⟨a_i|b_j⟩ between two shell lists.
pub fn overlap_between(a: &[BasisShell], b: &[BasisShell]) -> DMatrix<f64> {
    let oa = ao_offsets(a);
    let ob = ao_offsets(b);
    let mut joined: Vec<BasisShell> = a.to_vec();
    joined.extend(b.iter().cloned());
    let mut out = DMatrix::zeros(oa[a.len()], ob[b.len()]);
    for i in 0..a.len() {
        for j in 0..b.len() {
            let (s, _, _) = one_electron_block(&joined, i, a.len() + j, &[], false);
            let nb = b[j].n_functions();
            for x in 0..a[i].n_functions() {
                for y in 0..nb {
                    out[(oa[i] + x, ob[j] + y)] = s[x * nb + y];
                }
            }
        }
    }
    out
}

/// One-electron matrices (S, T, V) for a shell list and point charges.
pub fn one_electron(
    shells: &[BasisShell],
    nuclei: &[([f64; 3], f64)],
) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let off = ao_offsets(shells);
    let n = off[shells.len()];
    let pairs: Vec<(usize, usize)> = (0..shells.len())
        .flat_map(|a| (0..=a).map(move |b| (a, b)))
        .collect();
    let blocks = par::map_slice(&pairs, |&(a, b)| one_electron_block(shells, a, b, nuclei, true));
    let mut s = DMatrix::zeros(n, n);
    let mut t = DMatrix::zeros(n, n);
    let mut v = DMatrix::zeros(n, n);
    for (&(a, b), (bs, bt, bv)) in pairs.iter().zip(blocks) {
        let nb = shells[b].n_functions();
        for x in 0..shells[a].n_functions() {
            for y in 0..nb {
                let (i, j) = (off[a] + x, off[b] + y);
                for (m, blk) in [(&mut s, &bs), (&mut t, &bt), (&mut v, &bv)] {
                    m[(i, j)] = blk[x * nb + y];
                    m[(j, i)] = blk[x * nb + y];
                }
            }
        }
    }
    (s, t, v)
}

/// (ab|cd) for all component combinations of a shell-pair quartet.
fn eri_quartet(ab: &ShellPair, cd: &ShellPair, out: &mut [f64]) {
    let l = ab.la + ab.lb + cd.la + cd.lb;
    let nab = ab.prims[0].terms.len();
    let ncd = cd.prims[0].terms.len();
    out[..nab * ncd].iter_mut().for_each(|x| *x = 0.0);
    let pref = 2.0 * PI.powf(2.5);
    for pp in &ab.prims {
        for qq in &cd.prims {
            let (p, q) = (pp.p, qq.p);
            let alpha = p * q / (p + q);
            let pq = [
                pp.center[0] - qq.center[0],
                pp.center[1] - qq.center[1],
                pp.center[2] - qq.center[2],
            ];
            let r = HermiteR::new(l, alpha, pq);
            let f = pref / (p * q * (p + q).sqrt());
            for (x, ta) in pp.terms.iter().enumerate() {
                for (y, tc) in qq.terms.iter().enumerate() {
                    let mut sum = 0.0;
                    for m in 0..ta.n {
                        let [t, u, v] = ta.tuv[m];
                        let mut inner = 0.0;
                        for k in 0..tc.n {
                            let [tt, uu, vv] = tc.tuv[k];
                            let sign = if (tt + uu + vv) % 2 == 0 { 1.0 } else { -1.0 };
                            inner += sign * tc.c[k] * r.r[t + tt][u + uu][v + vv];
                        }
                        sum += ta.c[m] * inner;
                    }
                    out[x * ncd + y] += f * sum;
                }
            }
        }
    }
}

/// Packed two-electron integrals with Schwarz screening at `1e-15`.
pub fn electron_repulsion(shells: &[BasisShell]) -> PackedEri {
    let off = ao_offsets(shells);
    let n = off[shells.len()];
    let pairs: Vec<ShellPair> = (0..shells.len())
        .flat_map(|a| (0..=a).map(move |b| (a, b)))
        .map(|(a, b)| shell_pair(shells, a, b))
        .collect();
    // Schwarz bounds from the diagonal quartets.
    let bounds: Vec<f64> = par::map_slice(&pairs, |sp| {
        let mut buf = [0.0; 81];
        eri_quartet(sp, sp, &mut buf);
        let m = sp.prims[0].terms.len();
        (0..m)
            .map(|x| buf[x * m + x].abs())
            .fold(0.0f64, f64::max)
            .sqrt()
    });
    let blocks: Vec<Vec<(usize, f64)>> = par::map_range(pairs.len(), |i| {
        let ab = &pairs[i];
        let mut out = Vec::new();
        let mut buf = [0.0; 81];
        for (j, cd) in pairs.iter().enumerate().take(i + 1) {
            if bounds[i] * bounds[j] < 1e-15 {
                continue;
            }
            eri_quartet(ab, cd, &mut buf);
            let (na, nb) = (shells[ab.a].n_functions(), shells[ab.b].n_functions());
            let (nc, nd) = (shells[cd.a].n_functions(), shells[cd.b].n_functions());
            for x in 0..na {
                for y in 0..nb {
                    let (mu, nu) = (off[ab.a] + x, off[ab.b] + y);
                    for z in 0..nc {
                        for w in 0..nd {
                            let (la, si) = (off[cd.a] + z, off[cd.b] + w);
                            let v = buf[(x * nb + y) * (nc * nd) + z * nd + w];
                            out.push((pair_index(pair_index(mu, nu), pair_index(la, si)), v));
                        }
                    }
                }
            }
        }
        out
    });
    let mut eri = PackedEri::zeros(n);
    for blk in blocks {
        for (x, v) in blk {
            eri.data[x] = v;
        }
    }
    eri
}

/// AO integrals for `mol` in the named basis.
pub fn compute_ao_integrals(mol: &Molecule, basis: BasisName) -> Result<AOBundle> {
    let shells = build_shells(mol, basis)?;
    Ok(integrals_for_shells(mol, &shells))
}

/// AO integrals for an explicit shell list.
pub fn integrals_for_shells(mol: &Molecule, shells: &[BasisShell]) -> AOBundle {
    let nuclei: Vec<([f64; 3], f64)> = mol.atoms.iter().map(|a| (a.position, a.z as f64)).collect();
    let (s, t, v) = one_electron(shells, &nuclei);
    let eri = electron_repulsion(shells);
    let aos: Vec<AoFunction> = ao_functions(shells);
    let ao_atom_map = aos.iter().map(|f| shells[f.shell].center_atom_index).collect();
    let hcore = &t + &v;
    AOBundle {
        n_ao: s.nrows(),
        s,
        hcore,
        kinetic: Some(t),
        eri,
        e_nuc: mol.nuclear_repulsion(),
        ao_atom_map,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molint::geometry::{parse_geometry, LengthUnit};

    #[test]
    fn single_h_normalized() {
        let m = Molecule::new(vec![("H".into(), [0.0; 3])], 1).unwrap();
        let ao = compute_ao_integrals(&m, BasisName::Sto3g).unwrap();
        assert_eq!(ao.n_ao, 1);
        assert!((ao.s[(0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn p_functions_normalized() {
        let m = parse_geometry("O 0.1 -0.2 0.3", LengthUnit::Bohr, 0).unwrap();
        let ao = compute_ao_integrals(&m, BasisName::Sto3g).unwrap();
        for i in 0..ao.n_ao {
            assert!((ao.s[(i, i)] - 1.0).abs() < 1e-12);
        }
    }
}
