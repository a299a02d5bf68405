use sparsig::inpaint::{degrade, synthetic_signal, AnalysisProxMode, Formulation, InpaintTask};
use sparsig::{solve, Frame, StopCriteria};

fn main() {
    let n = 4096usize;
    let frame = Frame::gabor(64, 16, 128, n).unwrap();
    for seed in [101u64, 102, 103, 104] {
        let signal = synthetic_signal(n, seed);
        let (obs, mask) = degrade(&signal, 0.8, seed).unwrap();
        let run = |mode: AnalysisProxMode, stop: StopCriteria| -> (f64, usize) {
            let mut task = InpaintTask::new(obs.clone(), mask.clone(), frame.clone());
            task.formulation = Formulation::AnalysisConsistent;
            task.prox_mode = mode;
            task.stop = stop;
            task.reference = Some(signal.clone());
            let report = solve(&task).unwrap();
            (report.snr_db.unwrap(), report.trace.iterations())
        };
        for (name, stop) in [("loose", StopCriteria::loose()), ("strict", StopCriteria::strict())] {
            let (snr_a, it_a) = run(AnalysisProxMode::Approximal, stop);
            let (snr_e, it_e) = run(AnalysisProxMode::ExactNested, stop);
            println!(
                "seed {seed} {name:6}: DR-approx {snr_a:7.3} dB ({it_a:3} it), CP-exact {snr_e:7.3} dB ({it_e:3} it), |diff| {:.4}",
                (snr_a - snr_e).abs()
            );
        }
    }
}
