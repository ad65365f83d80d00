//! Published training times (seconds) for 100,000-document Wikipedia
//! corpora, used only for side-by-side reporting.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::corpus::Language;
use crate::summarize::System;

use super::RunRecord;

const KS: [usize; 6] = [5, 10, 50, 100, 200, 400];

/// Rows follow `KS`; columns are English, Spanish, French.
const FULL: [[f64; 3]; 6] = [
    [1861.0, 1388.0, 1208.0],
    [2127.0, 1731.0, 1362.0],
    [4194.0, 2680.0, 2319.0],
    [5288.0, 3413.0, 3323.0],
    [6364.0, 4524.0, 4667.0],
    [8654.0, 6625.0, 6751.0],
];
const ARTEX: [[f64; 3]; 6] = [
    [514.0, 448.0, 394.0],
    [607.0, 521.0, 438.0],
    [1051.0, 804.0, 709.0],
    [1565.0, 1303.0, 1039.0],
    [2536.0, 2076.0, 1573.0],
    [3404.0, 2853.0, 2073.0],
];
const BR: [[f64; 3]; 6] = [
    [318.0, 265.0, 238.0],
    [349.0, 298.0, 288.0],
    [466.0, 418.0, 465.0],
    [652.0, 602.0, 548.0],
    [919.0, 863.0, 838.0],
    [1081.0, 988.0, 978.0],
];
const BF: [[f64; 3]; 6] = [
    [466.0, 301.0, 276.0],
    [529.0, 348.0, 317.0],
    [1031.0, 727.0, 459.0],
    [1614.0, 737.0, 680.0],
    [2115.0, 814.0, 985.0],
    [2784.0, 1448.0, 988.0],
];

/// Published time for `(system, language, K)`, if the tables have one.
pub fn reference_time(system: System, language: Language, k: usize) -> Option<f64> {
    let table = match system {
        System::Full => &FULL,
        System::Artex => &ARTEX,
        System::Br => &BR,
        System::Bf => &BF,
    };
    let col = match language {
        Language::En => 0,
        Language::Es => 1,
        Language::Fr => 2,
        Language::Other => return None,
    };
    let row = KS.iter().position(|&x| x == k)?;
    Some(table[row][col])
}

/// Text table of published vs measured training times and FULL/system
/// speedups. Informational: hardware and corpus size differ.
pub fn compare_reference(records: &[RunRecord]) -> String {
    let mut measured: BTreeMap<(String, System, usize), (f64, usize)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.error.is_none()) {
        let e = measured.entry((r.language.clone(), r.system, r.k)).or_default();
        e.0 += r.summarize_time_s + r.train_time_s;
        e.1 += 1;
    }
    let mean = |key: &(String, System, usize)| measured.get(key).map(|(s, n)| s / *n as f64);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "Training time: published (100k Wikipedia docs) vs measured (this run)."
    );
    let _ = writeln!(
        out,
        "Measured time is summarization + training, averaged over rates and seeds."
    );
    let _ = writeln!(
        out,
        "Absolute values are not comparable; speedup = FULL time / system time at the same K."
    );
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<6} {:<5} {:>4} {:>12} {:>12} {:>14} {:>14}",
        "system", "lang", "K", "published_s", "measured_s", "pub_speedup", "meas_speedup"
    );
    for key in measured.keys() {
        let (lang, system, k) = key;
        let language: Language = lang.parse().unwrap_or(Language::Other);
        let published = reference_time(*system, language, *k);
        let pub_full = reference_time(System::Full, language, *k);
        let meas = mean(key);
        let meas_full = mean(&(lang.clone(), System::Full, *k));
        let fmt = |x: Option<f64>, prec: usize| x.map_or("-".to_string(), |v| format!("{v:.prec$}"));
        let ratio = |full: Option<f64>, sys: Option<f64>| match (full, sys) {
            (Some(f), Some(s)) if s > 0.0 => Some(f / s),
            _ => None,
        };
        let _ = writeln!(
            out,
            "{:<6} {:<5} {:>4} {:>12} {:>12} {:>14} {:>14}",
            system.name(),
            lang,
            k,
            fmt(published, 0),
            fmt(meas, 3),
            fmt(ratio(pub_full, published), 2),
            fmt(ratio(meas_full, meas), 2),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_values() {
        assert_eq!(reference_time(System::Full, Language::En, 400), Some(8654.0));
        assert_eq!(reference_time(System::Artex, Language::En, 400), Some(3404.0));
        assert_eq!(reference_time(System::Bf, Language::Fr, 400), Some(988.0));
        assert_eq!(reference_time(System::Br, Language::Es, 50), Some(418.0));
        assert_eq!(reference_time(System::Full, Language::Other, 5), None);
        assert_eq!(reference_time(System::Full, Language::En, 7), None);
    }
}
