//! Writes the ten-gesture fixture set with hidden-weight references, exports
//! unit-weight spectrograms for it, and scores them per slice.

use handsynth::dsp::Colormap;
use handsynth::metrics::SsimConfig;
use handsynth::pipeline::{
    evaluate_manifest, export_dataset, write_fixture_set, ExportOptions, HiddenWeightRule,
    SynthesisContext,
};

fn main() -> handsynth::Result<()> {
    let root = std::env::temp_dir().join("handsynth-fixtures");
    let ctx = SynthesisContext::default();
    let manifest = write_fixture_set(root.join("set"), 0, &ctx, Some(&HiddenWeightRule::default()))?;
    println!("manifest with {} entries in {}", manifest.entries.len(), root.join("set").display());

    let opts = ExportOptions {
        png: Some(Colormap::Jet),
        ..ExportOptions::default()
    };
    let index = export_dataset(&manifest, &ctx, None, root.join("export"), &opts)?;
    println!("exported {} spectrograms, {} failures", index.entries.len(), index.failures.len());
    for (label, ids) in &index.by_label {
        println!("  {label:<16} {}", ids.join(", "));
    }

    let report = evaluate_manifest(&manifest, &ctx, None, &SsimConfig::default())?;
    println!(
        "\nunit weights vs references: SSIM x100 {:.2}, MSE {:.5}",
        report.overall.mean_ssim_x100, report.overall.mean_mse
    );
    for (dim, values) in &report.slices {
        let parts: Vec<String> = values
            .iter()
            .map(|(v, s)| format!("{v}: {:.2} (n={})", s.mean_ssim_x100, s.count))
            .collect();
        println!("  by {dim:<10} {}", parts.join("  "));
    }
    Ok(())
}
