//! Synthesizes one parametric gesture with unit weights (or a trained
//! network) and writes the spectrogram, a PNG and a CSV.
//!
//! ```text
//! cargo run --release --example simulate_gesture -- double_clap [weights.bin]
//! ```

use handsynth::dsp::Colormap;
use handsynth::gestures::{generate, GestureKind, GestureSpec};
use handsynth::pipeline::{synthesize_sequence, SynthesisContext};
use handsynth::weightnet::{Feature, WeightNetParams};

fn main() -> handsynth::Result<()> {
    let mut args = std::env::args().skip(1);
    let kind: GestureKind = args.next().as_deref().unwrap_or("grasp").parse()?;
    let params = args.next().map(WeightNetParams::load).transpose()?;

    let seq = generate(&GestureSpec {
        angle_deg: 30.0,
        ..GestureSpec::new(kind)
    })?;
    let ctx = SynthesisContext::default();
    let synth = synthesize_sequence(kind.name(), &seq, &ctx, params.as_ref())?;

    println!(
        "{kind}: {} skeleton frames, {} hand(s), {} scatterers x {} radar frames",
        seq.len(),
        seq.hands(),
        synth.features.scatterers(),
        synth.features.frames()
    );
    println!("range bin {} ({:.3} m)", synth.bin, synth.bin as f64 * ctx.radar.range_bin_spacing());
    let w = synth.weights.as_slice();
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    println!("weights: mean {mean:.3}, min {:.3}, max {:.3}", w.iter().cloned().fold(f64::MAX, f64::min), w.iter().cloned().fold(f64::MIN, f64::max));
    for f in [Feature::Distance, Feature::RadialVelocity] {
        let (lo, hi) = (0..synth.features.scatterers())
            .flat_map(|s| (0..synth.features.frames()).map(move |t| (s, t)))
            .map(|(s, t)| synth.features.get(s, t, f))
            .fold((f64::MAX, f64::MIN), |(lo, hi), x| (lo.min(x), hi.max(x)));
        println!("{:<16} {lo:+.3} .. {hi:+.3}", f.name());
    }

    let dir = std::env::temp_dir();
    let spec = &synth.spectrogram;
    spec.save(dir.join(format!("{kind}.spec")))?;
    spec.save_png(dir.join(format!("{kind}.png")), Colormap::Jet, 8)?;
    spec.save_csv(dir.join(format!("{kind}.csv")))?;
    println!("wrote {}/{kind}.{{spec,png,csv}}", dir.display());
    Ok(())
}
