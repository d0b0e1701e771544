// temp calibration probe
use advattrib::corpus::*;
use advattrib::models::*;
use advattrib::scaling::*;
use advattrib::ssga::FeatureMask;
use std::time::Instant;

#[test]
#[ignore]
fn probe_accuracy_by_concentration() {
    for conc in [2000.0, 5000.0, 10000.0, 20000.0, 40000.0] {
        let mut accs = [vec![], vec![], vec![]];
        for seed in 0..5u64 {
            let config = CorpusConfig { seed: 1000 + seed, concentration: conc, ..CorpusConfig::default() };
            let set = LabeledSet::from_documents(&generate_corpus(&config).unwrap()).unwrap();
            for (k, kind) in [ModelKind::Rbfsvm, ModelKind::Lsvm, ModelKind::Ffnn].iter().enumerate() {
                let split = split_dataset(&set, &SplitSpec::for_kind(*kind, seed)).unwrap();
                let pipeline = build_pipeline(PipelineSpec::default(), &split.train.vectors).unwrap();
                let t0 = Instant::now();
                let mc = ModelConfig { svm: SvmConfig { seed, ..SvmConfig::default() }, ffnn: FfnnConfig { seed, ..FfnnConfig::default() } };
                let model = train(*kind, &mc, &split.train, &FeatureMask::all_ones(), &pipeline).unwrap();
                let acc = evaluate_accuracy(&model, &split.test).unwrap();
                let tr = evaluate_accuracy(&model, &split.train).unwrap();
                accs[k].push((acc, tr, t0.elapsed().as_millis()));
            }
        }
        for (k, name) in ["RBFSVM", "LSVM", "FFNN"].iter().enumerate() {
            let mean: f64 = accs[k].iter().map(|x| x.0).sum::<f64>() / accs[k].len() as f64;
            let tr_mean: f64 = accs[k].iter().map(|x| x.1).sum::<f64>() / accs[k].len() as f64;
            let ms: u128 = accs[k].iter().map(|x| x.2).sum::<u128>() / accs[k].len() as u128;
            println!("conc={conc:6} {name:7} test={mean:.3} train={tr_mean:.3} ms={ms}");
        }
    }
}
