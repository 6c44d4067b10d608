//! Check-node rules of the dual component code on one input vector,
//! next to the brute-force MAP and max-log references.
//!
//! ```text
//! cargo run --example component_rules -- 1.2 -0.4 2.5 0.8 -1.7 0.3
//! ```

use cwgldpc::component::ComponentCode;

fn main() -> cwgldpc::Result<()> {
    let mut l: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().expect("LLR values")).collect();
    if l.is_empty() {
        l = vec![1.2, -0.4, 2.5, 0.8, -1.7, 0.3];
    }
    let code = ComponentCode::canonical(l.len())?;
    let sp = code.cn_update_sp(&l)?;
    let ms = code.cn_update_ms(&l)?;
    let latent = code.cn_update_ms_latent(&l)?;
    let map = code.map_oracle(&l)?;
    let max = code.max_oracle(&l)?;

    println!("{:>3} {:>4} {:>8} {:>10} {:>10} {:>10} {:>10}", "i", "type", "L", "SP", "MAP-L", "MS", "latent MS");
    for i in 0..l.len() {
        println!(
            "{i:>3} {:>4} {:>8.3} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
            ["X", "Y", "Z"][i % 3],
            l[i],
            sp[i],
            map[i] - l[i],
            ms[i],
            latent[i]
        );
        debug_assert!((ms[i] - (max[i] - l[i])).abs() < 1e-9);
    }
    Ok(())
}
