// scratch: isolate per-position window pass rates (dev only)
use glyphgate::data;
fn tsw2019(w: i64, u: f64) -> f64 { ((w as f64) / u * 1000.0).round() }
fn main() {
    let metrics = data::font("Calibri").unwrap();
    let text: Vec<char> = "Exhibit A. ".chars().collect();
    let w: Vec<i64> = text.iter().map(|c| metrics.widths[c].0).collect();
    let d = 120.0 / 18.0;
    let mut each = vec![0usize; 11];
    let mut prefix = vec![0usize; 11];
    let mut total = 0usize;
    for ustep in -100_000i64..100_000 {
        let u = 1000.0 + ustep as f64 * 0.0008;
        let mut t_cum = Vec::new();
        let mut acc = 0.0;
        for &wi in &w { acc += tsw2019(wi, u); t_cum.push(acc); }
        total += 1;
        let mut ok_prefix = true;
        for j in 0..10usize {
            let (lo, hi) = if j == 5 { (-3.44, -3.06) } else { (-2.94, 2.94) };
            let t_rel = if j <= 5 { t_cum[j] } else { t_cum[j] - t_cum[5] };
            let klo = ((t_rel - hi) / d).ceil() as i64;
            let khi = ((t_rel - lo) / d).floor() as i64;
            let pass = klo <= khi;
            if pass { each[j] += 1; }
            if ok_prefix && !pass { ok_prefix = false; }
            if ok_prefix { prefix[j] += 1; }
        }
    }
    println!("total {total}");
    println!("each   {:?}", each);
    println!("prefix {:?}", prefix);
    // dump example T_5 residues
    for ustep in [-50000i64, -20000, 0, 20000, 50000] {
        let u = 1000.0 + ustep as f64 * 0.0008;
        let mut acc = 0.0;
        for &wi in &w[..6] { acc += tsw2019(wi, u); }
        println!("u={u}: T5={acc} mod20={}", (acc as i64) % 20);
    }
}
