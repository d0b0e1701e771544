// temp probe: FFNN lane with cheap-FFNN fitness + validation-fitness variant
use advattrib::corpus::*;
use advattrib::models::*;
use advattrib::scaling::*;
use advattrib::ssga::*;

fn run(conc: f64, fit_epochs: usize, mutation: f64, budget: usize, n_seeds: u64, val_fitness: bool) {
    let mut wins = 0;
    let (mut msum, mut usum) = (0.0, 0.0);
    let mut fit_range = (1.0f64, 0.0f64);
    let mut bits_sum = 0usize;
    for seed in 0..n_seeds {
        let config = CorpusConfig { seed: 500 + seed, concentration: conc, ..CorpusConfig::default() };
        let set = LabeledSet::from_documents(&generate_corpus(&config).unwrap()).unwrap();
        let split = split_dataset(&set, &SplitSpec::ffnn(seed)).unwrap();
        let pipeline = build_pipeline(PipelineSpec::default(), &split.train.vectors).unwrap();
        let mc = ModelConfig { ffnn: FfnnConfig { seed, ..FfnnConfig::default() }, ..ModelConfig::default() };
        let fit_mc = ModelConfig { ffnn: FfnnConfig { seed, hidden_units: 16, max_iterations: fit_epochs, learning_rate: 0.05, patience: usize::MAX, ..FfnnConfig::default() }, ..ModelConfig::default() };
        let unmasked = train(ModelKind::Ffnn, &mc, &split.train, &FeatureMask::all_ones(), &pipeline).unwrap();
        let unmasked_acc = evaluate_accuracy(&unmasked, &split.test).unwrap();
        let ga = GaConfig { seed, max_evaluations: budget, mutation_rate: mutation, ..GaConfig::default() };
        let run = run_ssga(&ga, |mask| {
            let m = train(ModelKind::Ffnn, &fit_mc, &split.train, mask, &pipeline)?;
            if val_fitness { evaluate_accuracy(&m, &split.valid) } else { evaluate_accuracy(&m, &split.train) }
        }).unwrap();
        fit_range = (fit_range.0.min(run.best.fitness), fit_range.1.max(run.best.fitness));
        bits_sum += run.best.mask.count_active();
        let masked = train(ModelKind::Ffnn, &mc, &split.train, &run.best.mask, &pipeline).unwrap();
        let masked_acc = evaluate_accuracy(&masked, &split.test).unwrap();
        if masked_acc >= unmasked_acc - 0.02 { wins += 1; }
        msum += masked_acc; usum += unmasked_acc;
    }
    println!("conc={conc} fitE={fit_epochs} mut={mutation} val={val_fitness}: wins={wins}/{n_seeds} masked={:.3} unmasked={:.3} fit={:.3}..{:.3} bits={}",
        msum / n_seeds as f64, usum / n_seeds as f64, fit_range.0, fit_range.1, bits_sum as f64 / n_seeds as f64);
}

#[test]
#[ignore]
fn probe() {
    run(3000.0, 40, 0.05, 150, 8, false);
    run(3000.0, 40, 0.5, 150, 8, false);
    run(3000.0, 40, 0.05, 150, 8, true);
    run(5000.0, 40, 0.05, 150, 8, false);
    run(5000.0, 40, 0.05, 150, 8, true);
}
