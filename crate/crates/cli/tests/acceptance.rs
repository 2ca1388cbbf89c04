//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use birkhoff::alphafam::{self, FloatMatrix, HighFloat};
use birkhoff::bistoch::{self, canonical_form, maxtrace, BistochMatrix, MaxtraceMethod};
use birkhoff::format::{self, Record};
use birkhoff::kernelmr::{self, Cosine, DyadicGrid, KernelFn, StepKernel, Uniform};
use birkhoff::randindep::{self, McConfig};
use birkhoff::{erdosenum, infarray, orbits, ExactMatrix, Perm, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn birkhoff(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_birkhoff")).args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("birkhoff {args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

/// Header line and the class records printed by `enumerate`.
fn parse_enumeration(stdout: &str) -> Result<(String, Vec<BistochMatrix>), String> {
    let (head, body) = stdout.split_once('\n').ok_or("empty output")?;
    let records = format::parse_records(body).map_err(|e| e.to_string())?;
    let classes = records
        .into_iter()
        .map(|r| BistochMatrix::new(r.matrix).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    Ok((head.to_string(), classes))
}

fn bistoch(rows: &[&[i64]], denom: i64) -> BistochMatrix {
    let rows: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
    BistochMatrix::new(ExactMatrix::from_integers(&rows, denom)).unwrap()
}

fn sorted_canonical(ms: &[BistochMatrix]) -> Vec<BistochMatrix> {
    let mut v: Vec<_> = ms.iter().map(canonical_form).collect();
    v.sort_by_key(|m| format::write_matrix(m.inner()));
    v
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let (head, classes) = parse_enumeration(&birkhoff(&["enumerate", "--n", "3"])?)?;
    let elapsed = start.elapsed();
    let expected = [
        bistoch(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], 1),
        bistoch(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]], 3),
        bistoch(&[&[2, 0, 0], &[0, 1, 1], &[0, 1, 1]], 2),
        bistoch(&[&[0, 2, 2], &[2, 1, 1], &[2, 1, 1]], 4),
        bistoch(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]], 2),
        bistoch(&[&[3, 0, 2], &[0, 3, 2], &[2, 2, 1]], 5),
    ];
    ensure(head.starts_with("6 classes"), format!("header {head:?}"))?;
    ensure(sorted_canonical(&classes) == sorted_canonical(&expected), "class list differs from I, J, I+J2, S, T, R")?;
    ensure(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"))?;
    Ok(format!("6 classes in {elapsed:.2?}"))
}

const TABLE_1: [[u64; 6]; 10] = [
    [1, 1, 1, 1, 1, 1],
    [2, 23, 23, 23, 23, 4],
    [3, 253, 253, 244, 172, 6],
    [4, 1771, 1768, 1400, 580, 14],
    [5, 8855, 8780, 5275, 1040, 11],
    [6, 33649, 32736, 11652, 1086, 14],
    [7, 100947, 93765, 17059, 1589, 6],
    [8, 245157, 204688, 14456, 416, 3],
    [9, 490314, 320304, 5286, 300, 1],
    [10, 817190, 287180, 30, 30, 1],
];

fn criterion_2() -> Result<(String, Vec<BistochMatrix>), String> {
    let stats = std::env::temp_dir().join(format!("birkhoff-acceptance-{}.tsv", std::process::id()));
    let start = Instant::now();
    let stdout = birkhoff(&["enumerate", "--n", "4", "--stats", stats.to_str().unwrap()])?;
    let elapsed = start.elapsed();
    let tsv = std::fs::read_to_string(&stats).map_err(|e| e.to_string())?;
    let _ = std::fs::remove_file(&stats);
    let (head, classes) = parse_enumeration(&stdout)?;
    ensure(head == "41 classes (32 up to transpose)", format!("header {head:?}"))?;
    ensure(classes.len() == 41, format!("{} records", classes.len()))?;
    let rows: Vec<Vec<u64>> = tsv
        .lines()
        .skip(1)
        .map(|l| l.split('\t').map(|t| t.parse().map_err(|_| format!("bad TSV field {t:?}"))).collect())
        .collect::<Result<_, _>>()?;
    ensure(rows.len() == TABLE_1.len(), format!("{} stats rows", rows.len()))?;
    for (got, want) in rows.iter().zip(TABLE_1) {
        ensure(got[..] == want[..], format!("k = {}: {got:?} != {want:?}", want[0]))?;
    }
    ensure(elapsed < Duration::from_secs(30 * 60), format!("took {elapsed:?}"))?;
    Ok((format!("41 classes, 32 up to transpose, all 10 stats rows exact, {elapsed:.2?}"), classes))
}

fn criterion_3(classes: &[BistochMatrix]) -> Check {
    let records: Vec<Record> = format::parse_records(format::appendix_text()).map_err(|e| e.to_string())?;
    ensure(records.len() == 41, format!("{} bundled records", records.len()))?;
    for (i, r) in records.iter().enumerate() {
        let b = BistochMatrix::new(r.matrix.clone()).map_err(|e| format!("matrix {}: {e}", i + 1))?;
        ensure(bistoch::delta(&b).delta == Rational::zero(), format!("matrix {} has nonzero delta", i + 1))?;
    }
    let report = erdosenum::verify_appendix(&records, classes).map_err(|e| e.to_string())?;
    ensure(report.all_erdos && report.pairwise_inequivalent && report.matches_enumeration, format!("{report:?}"))?;
    Ok("41 matrices, delta 0, pairwise inequivalent, same classes as the enumeration".into())
}

fn e<T>(r: birkhoff::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn strings<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

const F4: [u64; 12] = [1, 4, 10, 41, 103, 309, 691, 1458, 2448, 3703, 4587, 5050];
const F5: [u64; 12] =
    [1, 6, 37, 715, 13710, 256751, 4140666, 58402198, 726296995, 8060937770, 80604620206, 732149722382];

fn criterion_4() -> Check {
    let f3 = e(orbits::orbit_table(3, 6))?;
    ensure(strings(&f3) == strings(&[1, 2, 2, 2, 1, 1]), format!("f3 = {:?}", strings(&f3)))?;
    let f4 = e(orbits::orbit_table(4, 12))?;
    ensure(strings(&f4) == strings(&F4), format!("f4 = {:?}", strings(&f4)))?;
    for (n, kmax) in [(3, 6), (4, 12)] {
        let burnside = e(orbits::orbit_table(n, kmax))?;
        for k in 1..=kmax {
            let canon = e(orbits::count_orbits_canonical(n, k))?;
            ensure(canon.to_string() == burnside[k - 1].to_string(), format!("n = {n}, k = {k}: methods disagree"))?;
        }
    }
    let start = Instant::now();
    let f5 = e(orbits::orbit_table(5, 12))?;
    let elapsed = start.elapsed();
    ensure(strings(&f5) == strings(&F5), format!("f5 = {:?}", strings(&f5)))?;
    ensure(elapsed < Duration::from_secs(300), format!("n = 5 took {elapsed:?}"))?;
    Ok(format!("n = 3, 4, 5 tables exact, canonical = Burnside for n <= 4, n = 5 in {elapsed:.2?}"))
}

fn criterion_5() -> Check {
    for n in 2..=8 {
        let f2 = orbits::count_orbits_burnside(n, 2).map_err(|e| e.to_string())?;
        let p = orbits::partition_count(n);
        ensure(f2.to_string() == (p - 1u32).to_string(), format!("n = {n}: f2 = {f2}"))?;
    }
    let f4 = orbits::orbit_table(4, 24).map_err(|e| e.to_string())?;
    ensure(f4[23].to_string() == "1", "f(4,24) != 1")?;
    for k in 1..24 {
        ensure(f4[k - 1] == f4[23 - k], format!("f(4,{k}) != f(4,{})", 24 - k))?;
    }
    Ok("f(n,2) = p(n) - 1 for n = 2..8, f(4,k) = f(4,24-k)".into())
}

fn hf(x: f64) -> HighFloat {
    HighFloat::from_f64(x).unwrap()
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let tol = 1e-10;
    for _ in 0..200 {
        let alpha = hf(rng.gen_range(1e-6..0.5 - 1e-6));
        let (a, b) = alphafam::interval3(&alpha).map_err(|e| e.to_string())?;
        let x = &a + (&b - &a) * hf(rng.gen_range(0.0..=1.0));
        let m = alphafam::alpha_erdos3(&alpha, &x).map_err(|e| e.to_string())?;
        ensure(m.report.passes(tol), format!("n = 3: {:?}", m.report))?;
    }
    for n in [5usize, 6] {
        for _ in 0..200 {
            let hi = (n - 1) as f64 / 4.0;
            let alpha = hf(rng.gen_range(1e-6..hi - 1e-6));
            let (a, b) = alphafam::interval_n(n, &alpha).map_err(|e| e.to_string())?;
            let x = &a + (&b - &a) * hf(rng.gen_range(0.0..=1.0));
            let m = alphafam::alpha_erdos_n(n, &alpha, &x).map_err(|e| e.to_string())?;
            ensure(m.report.passes(tol), format!("n = {n}: {:?}", m.report))?;
        }
    }
    // Both branches of the lower end meet at 7/18.
    let at = HighFloat::from_ratio(2, 9);
    let above = &at + HighFloat::from_ratio(1, 1_000_000_000_000_000);
    let (lo, _) = alphafam::interval3(&at).map_err(|e| e.to_string())?;
    let (hi, _) = alphafam::interval3(&above).map_err(|e| e.to_string())?;
    let seven_18 = HighFloat::from_ratio(7, 18);
    let gap = (&lo - &seven_18).abs().max((&hi - &seven_18).abs()).to_f64();
    ensure(gap <= tol, format!("branches differ by {gap:e} at 2/9"))?;
    Ok(format!("600 members within {tol:e}, branch gap {gap:.1e}"))
}

fn criterion_7() -> Check {
    for n in 2..=7 {
        let d = bistoch::delta(&BistochMatrix::midpoint(n)).delta;
        ensure(d == Rational::new(n as i64 - 1, 4), format!("n = {n}: delta = {d}"))?;
    }
    Ok("delta((I+J)/2) = (n-1)/4 exactly for n = 2..7".into())
}

fn criterion_8() -> Check {
    let alpha0 = HighFloat::from_ratio(1, 4);
    let (a, b) = alphafam::interval3(&alpha0).map_err(|e| e.to_string())?;
    let a3 = alphafam::alpha_erdos3(&alpha0, &((&a + &b) * HighFloat::from_ratio(1, 2)))
        .map_err(|e| e.to_string())?
        .matrix;
    let n = 5;
    let alpha = hf(0.8);
    let p = alphafam::alpha_on_segment(n, &alpha, &a3).map_err(|e| e.to_string())?;
    let err = (&p.delta - &alpha).abs().to_f64();
    ensure(err <= 1e-10, format!("|delta - alpha| = {err:e}"))?;
    let d_mid = FloatMatrix::midpoint(n).delta();
    let d_end = a3.direct_sum_identity(n - 3).delta();
    let e_mid = (&d_mid - HighFloat::from_ratio(n as i64 - 1, 4)).abs().to_f64();
    let e_end = (&d_end - &alpha0).abs().to_f64();
    ensure(e_mid <= 1e-10 && e_end <= 1e-10, format!("endpoint errors {e_mid:e}, {e_end:e}"))?;
    Ok(format!("t = {}, |delta - 0.8| = {err:.1e}, endpoints 1 and 1/4", p.t))
}

fn random_sub_bistochastic(rng: &mut ChaCha8Rng) -> ExactMatrix {
    let n = rng.gen_range(1..=6);
    let raw: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..8)).collect()).collect();
    let m = ExactMatrix::from_integers(&raw, 1);
    let max = m.row_sums().into_iter().chain(m.col_sums()).max().unwrap();
    if max.is_zero() {
        return m;
    }
    // Scale so the largest line sum lands anywhere in (0, 1].
    let shrink = Rational::new(rng.gen_range(1..=10), 10);
    m.scale(&(max.recip() * shrink))
}

fn criterion_9() -> Check {
    let a = infarray::example_array(64).map_err(|e| e.to_string())?;
    for k in 1..=64 {
        ensure(a.row_sum(k) == Rational::one(), format!("row {k} sums to {}", a.row_sum(k)))?;
    }
    let l2 = infarray::prefix_l2(&a);
    ensure(l2 < Rational::new(1328, 1000), format!("l2 = {l2}"))?;
    for t in 0..=32 {
        let got = infarray::pairing_trace(&a, t).map_err(|e| e.to_string())?;
        let want = Rational::new(4, 3) * (Rational::one() - Rational::pow2_neg(2 * t as u32));
        ensure(got == want, format!("T = {t}: {got} != {want}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..1000 {
        let b = random_sub_bistochastic(&mut rng);
        let n = b.rows();
        let sub = infarray::SubBistochastic::new(b.clone()).map_err(|e| format!("sample {i}: {e}"))?;
        let c = infarray::bistochastic_extension(&sub);
        ensure(bistoch::is_bistochastic(c.inner()) && c.n() == 2 * n, format!("sample {i}: not bistochastic"))?;
        let block_ok = (0..n).all(|r| (0..n).all(|s| c.get(r, s) == b.get(r, s)));
        ensure(block_ok, format!("sample {i}: leading block changed"))?;
    }
    Ok(format!("64 rows sum to 1, l2 ~ {}, 33 pairing sums exact, 1000 extensions", format::fmt_sig(l2.to_f64())))
}

fn criterion_10() -> Check {
    let mut kernels: Vec<Box<dyn KernelFn>> = vec![Box::new(Uniform)];
    for eps in [0.25, 0.5, 1.0] {
        kernels.push(Box::new(Cosine::new(eps).unwrap()));
    }
    let continuous = kernels.len();
    kernels.extend((0..100).map(|s| Box::new(StepKernel::random(s)) as Box<dyn KernelFn>));
    let mut worst_tower = 0.0f64;
    for (i, w) in kernels.iter().enumerate() {
        for m in 0..=8 {
            let r = kernelmr::kernel_check(w.as_ref(), m, 4).map_err(|e| e.to_string())?;
            ensure(r.finite.holds, format!("{} m = {m}: finite {:?}", r.kernel, r.finite))?;
            ensure(r.coupling_identity.holds && r.coupling_transpose.holds, format!("{} m = {m}: coupling", r.kernel))?;
            ensure(r.tower_error <= 1e-12, format!("{} m = {m}: tower error {:e}", r.kernel, r.tower_error))?;
            worst_tower = worst_tower.max(r.tower_error);
            if m == 8 && i < continuous {
                let mono = r.refinement[1..].windows(2).all(|p| p[1] <= p[0] * (1.0 + 1e-12));
                ensure(mono, format!("{}: refinement {:?}", r.kernel, r.refinement))?;
            }
        }
    }
    // Direct call with an explicit coupling grid.
    let g = kernelmr::dyadic_average(&Cosine::new(1.0).unwrap(), 5, 1).map_err(|e| e.to_string())?;
    let c = kernelmr::check_coupling_mr(&g, &DyadicGrid::identity_coupling(5), kernelmr::TOL).map_err(|e| e.to_string())?;
    ensure(c.holds, format!("{c:?}"))?;
    Ok(format!("{} kernels x m = 0..8, worst tower error {worst_tower:.1e}", kernels.len()))
}

fn criterion_11() -> Check {
    let mut summary = Vec::new();
    for (n, expected, tol) in [(5, 0.77312, 0.03), (8, 0.0852661, 0.02)] {
        let r = randindep::estimate(&McConfig::new(n, 10_000, 2024).map_err(|e| e.to_string())?);
        ensure((r.estimate - expected).abs() <= tol, format!("n = {n}: {} vs {expected}", r.estimate))?;
        ensure(r.dependent + r.independent == 10_000, "sample count")?;
        summary.push(format!("n = {n}: {}", r.estimate));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..10_000 {
        let n = 4 + i % 3;
        let k = (n - 1) * (n - 1) + 1;
        let (s, _) = randindep::sample_subset(n, k, &mut rng);
        let p = randindep::random_prime(&mut rng);
        let fast = randindep::is_dependent_mod_p(&s, p);
        ensure(fast == randindep::is_dependent_exact(&s), format!("subset {i}: modular verdict differs"))?;
    }
    let c = McConfig::new(6, 300, 77).map_err(|e| e.to_string())?;
    ensure(randindep::estimate(&c) == randindep::estimate(&c), "not deterministic")?;
    let a = birkhoff(&["mc", "--n", "5", "--iters", "200", "--seed", "3"])?;
    let b = birkhoff(&["mc", "--n", "5", "--iters", "200", "--seed", "3", "--workers", "2"])?;
    ensure(a == b, "mc output depends on worker count")?;
    Ok(format!("{}, modular = exact on 10^4 subsets", summary.join(", ")))
}

fn random_bistochastic(n: usize, rng: &mut ChaCha8Rng) -> BistochMatrix {
    let mut counts = vec![vec![0i64; n]; n];
    let mut total = 0;
    for _ in 0..rng.gen_range(1..=n + 2) {
        let p = randindep::uniform_perm(n, rng);
        let w = rng.gen_range(1..=9);
        for (i, row) in counts.iter_mut().enumerate() {
            row[p.apply(i)] += w;
        }
        total += w;
    }
    BistochMatrix::new(ExactMatrix::from_integers(&counts, total)).unwrap()
}

fn criterion_12() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..10_000 {
        let n = 1 + i % 7;
        let a = random_bistochastic(n, &mut rng);
        let d = bistoch::delta(&a).delta;
        ensure(!d.is_negative(), format!("negative delta {d}"))?;
        if i % 10 == 0 {
            let (p, q) = (randindep::uniform_perm(n, &mut rng), randindep::uniform_perm(n, &mut rng));
            ensure(bistoch::delta(&a.permute(&p, &q)).delta == d, "delta changed under PAQ")?;
            ensure(bistoch::delta(&a.transpose()).delta == d, "delta changed under transpose")?;
        }
    }
    for i in 0..1000 {
        let n = 1 + i % 7;
        let denom = rng.gen_range(1..=6);
        let raw: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-20..=20)).collect()).collect();
        let m = ExactMatrix::from_integers(&raw, denom);
        let brute = maxtrace(&m, MaxtraceMethod::Brute).map_err(|e| e.to_string())?;
        let assign = maxtrace(&m, MaxtraceMethod::Assignment).map_err(|e| e.to_string())?;
        ensure(brute.value == assign.value, format!("sample {i}: {} != {}", brute.value, assign.value))?;
        let sigma: &Perm = &assign.sigma;
        let trace: Rational = (0..n).map(|r| m.get(r, sigma.apply(r)).clone()).sum();
        ensure(trace == assign.value, format!("sample {i}: witness trace {trace}"))?;
    }
    Ok("10^4 deltas >= 0 with PAQ/transpose invariance, 10^3 brute = assignment".into())
}

fn report(id: u32, check: Check) -> bool {
    match check {
        Ok(detail) => {
            println!("criterion {id:>2}: PASS  {detail}");
            true
        }
        Err(why) => {
            println!("criterion {id:>2}: FAIL  {why}");
            false
        }
    }
}

fn main() {
    let mut ok = report(1, criterion_1());
    let classes = match criterion_2() {
        Ok((detail, classes)) => {
            ok &= report(2, Ok(detail));
            Some(classes)
        }
        Err(why) => {
            ok &= report(2, Err(why));
            None
        }
    };
    ok &= report(3, classes.as_deref().ok_or_else(|| "no enumeration to compare against".to_string()).and_then(criterion_3));
    let rest: [(u32, fn() -> Check); 9] = [
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
        (12, criterion_12),
    ];
    for (id, f) in rest {
        ok &= report(id, f());
    }
    if !ok {
        std::process::exit(1);
    }
}
