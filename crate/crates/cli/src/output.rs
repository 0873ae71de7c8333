//! CSV and JSON emission.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use qes_core::spectra::{Branch, ScanGrid, SpectrumReport};
use qes_core::tables::TableReport;
use serde::Serialize;

/// `x` with 10 significant digits, `%g` style.
pub fn sig10(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    // rounding can carry into the next decade
    let s = format!("{:.9e}", x);
    let exp = s.rsplit('e').next().and_then(|e| e.parse::<i32>().ok()).unwrap_or(exp);
    if (-4..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let (mant, e) = s.split_once('e').unwrap_or((&s, "0"));
        format!("{}e{}", trim_zeros(mant.to_string()), e)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(sig10).unwrap_or_default()
}

/// Writes `text` to `out`, or to stdout when `out` is `None`.
pub fn emit(out: Option<&Path>, text: &str) -> io::Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text)
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn flags_field(b: &Branch) -> String {
    let f = &b.flags;
    let names = [
        (f.real_energy, "real-energy"),
        (f.nu_admissible, "nu-admissible"),
        (f.roots_real, "roots-real"),
        (f.pole_clear, "pole-clear"),
        (f.normalizable, "normalizable"),
        (f.degenerate_pair, "degenerate-pair"),
        (f.singular, "singular"),
        (f.energy_consistent, "energy-consistent"),
    ];
    names.iter().filter(|(on, _)| *on).map(|(_, n)| *n).collect::<Vec<_>>().join(";")
}

pub fn spectrum_csv(report: &SpectrumReport) -> String {
    let mut s = String::from("index,nu,nu_im,g,E,E_im,kappa,rho,roots,residual,flags\n");
    for (i, b) in report.branches.iter().enumerate() {
        let roots: Vec<String> = b
            .roots
            .iter()
            .map(|z| match z.im {
                im if im == 0.0 => sig10(z.re),
                im if im < 0.0 => format!("{}{}i", sig10(z.re), sig10(im)),
                im => format!("{}+{}i", sig10(z.re), sig10(im)),
            })
            .collect();
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            i,
            sig10(b.nu),
            sig10(b.nu_im),
            sig10(b.g),
            sig10(b.energy),
            sig10(b.energy_im),
            opt(b.kappa),
            opt(b.rho),
            roots.join(";"),
            sig10(b.residual),
            flags_field(b)
        ));
    }
    s
}

pub fn table_csv(report: &TableReport) -> String {
    let h4 = report.entries.iter().any(|e| e.reference.rho.is_some());
    let mut s = String::from("ell,branch,nu,nu_ref,E,E_ref");
    if h4 {
        s.push_str(",rho,rho_ref,kappa,kappa_ref");
    }
    s.push_str(",delta\n");
    for e in &report.entries {
        let c = e.computed.as_ref();
        let r = &e.reference;
        s.push_str(&format!(
            "{},{},{},{},{},{}",
            r.ell,
            r.branch,
            opt(c.map(|b| b.nu)),
            sig10(r.nu),
            opt(c.map(|b| b.energy)),
            sig10(r.energy)
        ));
        if h4 {
            s.push_str(&format!(
                ",{},{},{},{}",
                opt(c.and_then(|b| b.rho)),
                opt(r.rho),
                opt(c.and_then(|b| b.kappa)),
                opt(r.kappa)
            ));
        }
        s.push_str(&format!(",{}\n", opt(e.delta)));
    }
    s
}

pub fn scan_csv(grid: &ScanGrid) -> String {
    let mut s = String::from("gamma,rho,nu,E_re,E_im,is_real\n");
    for sample in &grid.samples {
        for p in &sample.real {
            s.push_str(&format!("{},{},{},{},0,1\n", sig10(p.gamma), sig10(p.rho), sig10(p.nu), sig10(p.energy)));
        }
        for &(e_re, e_im, rho, nu) in &sample.complex {
            s.push_str(&format!(
                "{},{},{},{},{},0\n",
                sig10(sample.gamma),
                sig10(rho),
                sig10(nu),
                sig10(e_re),
                sig10(e_im)
            ));
        }
    }
    s
}

pub fn scan_counts(grid: &ScanGrid) -> String {
    let mut s = String::from("gamma,real_count,complex_count,error\n");
    for sample in &grid.samples {
        s.push_str(&format!(
            "{},{},{},{}\n",
            sig10(sample.gamma),
            sample.real_count,
            sample.complex_count,
            sample.error.as_deref().unwrap_or("").replace(',', ";")
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(sig10(1.0), "1");
        assert_eq!(sig10(-0.50683), "-0.50683");
        assert_eq!(sig10(std::f64::consts::PI), "3.141592654");
        assert_eq!(sig10(123456.789012345), "123456.789");
        assert_eq!(sig10(1.0e-7), "1e-7");
        assert_eq!(sig10(9.9999999999), "10");
        assert_eq!(sig10(-2.5e12), "-2.5e12");
        assert_eq!(sig10(0.0), "0");
    }
}
