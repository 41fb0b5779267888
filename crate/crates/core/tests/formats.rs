use pac_implicit::bench::{
    builtin_problem, format_dataset, gen_cuben, gen_simplexn, parse_dataset, read_csv, run_experiment, sample_dataset,
    write_csv, BenchError, DatasetConfig, ExperimentConfig, Label, ProblemSpec,
};
use pac_implicit::linarith::Vocabulary;
use pac_implicit::rational::{int, ratio};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn line_of(e: BenchError) -> usize {
    match e {
        BenchError::Parse { line, .. } => line,
        other => panic!("expected a parse error, got {other}"),
    }
}

#[test]
fn problems_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let specs = [
        builtin_problem("pollution").unwrap(),
        builtin_problem("police").unwrap(),
        gen_simplexn(3, &mut rng).unwrap(),
        gen_cuben(4, &mut rng).unwrap(),
    ];
    for spec in specs {
        let text = spec.render();
        assert_eq!(ProblemSpec::parse(&text).unwrap(), spec, "{text}");
    }
}

#[test]
fn problem_errors_carry_line_numbers() {
    let good = "name: p\ngoal: maximise\nvar x 0 1\ncon x <= 1/2\nobj x\n";
    assert!(ProblemSpec::parse(good).is_ok());
    assert_eq!(
        line_of(ProblemSpec::parse(&good.replace("var x 0 1", "var x 1 0")).unwrap_err()),
        3
    );
    assert_eq!(
        line_of(ProblemSpec::parse(&good.replace("con x <= 1/2", "con x != 1/2")).unwrap_err()),
        4
    );
    assert_eq!(
        line_of(ProblemSpec::parse(&good.replace("goal: maximise", "goal: sideways")).unwrap_err()),
        2
    );
    assert_eq!(
        line_of(ProblemSpec::parse(&good.replace("obj x", "objective x")).unwrap_err()),
        5
    );
    assert!(ProblemSpec::parse(&good.replace("name: p\n", "")).is_err());
}

#[test]
fn datasets_round_trip() {
    let spec = builtin_problem("pollution").unwrap();
    let config = DatasetConfig {
        noise: ratio(1, 4),
        mask_probability: 0.2,
        ..DatasetConfig::new(40)
    };
    let mut data = sample_dataset(&spec, &config, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
    assert_eq!(data.samples.iter().filter(|s| s.label == Label::Positive).count(), 20);
    let text = format_dataset(&data);
    let mut vocab = spec.vocab.clone();
    let back = parse_dataset(&text, &mut vocab).unwrap();
    for s in &mut data.samples {
        s.outlier = false;
    }
    assert_eq!(back, data);
    assert_eq!(vocab, spec.vocab);
}

#[test]
fn dataset_header_and_infinities() {
    let text = "# vars: b,a\npos;;1,2,-inf,inf\nneg;3,4;\npos;5,6;5,5,+inf,inf\n";
    let mut vocab = Vocabulary::new();
    let err = parse_dataset(text, &mut vocab).unwrap_err();
    assert_eq!(line_of(err), 4);

    let text = "# vars: b,a\npos;;1,2,-inf,inf\nneg;3,4;\n";
    let mut vocab = Vocabulary::new();
    let data = parse_dataset(text, &mut vocab).unwrap();
    let (b, a) = (vocab.get("b").unwrap().clone(), vocab.get("a").unwrap().clone());
    let phi = data.samples[0].blurred.as_ref().unwrap();
    assert_eq!(phi.get(&b).lower(), Some(&int(1)));
    assert!(phi.get(&a).is_unbounded());
    assert_eq!(data.samples[1].point[&a], int(4));
    assert_eq!(data.observations().len(), 1);
}

#[test]
fn dataset_errors_carry_line_numbers() {
    let mut v = Vocabulary::new();
    assert_eq!(
        line_of(parse_dataset("pos;1,2;1,1,2,2\nmaybe;1,2;\n", &mut v).unwrap_err()),
        2
    );
    let mut v = Vocabulary::new();
    assert_eq!(
        line_of(parse_dataset("pos;1,2;1,1,2,2\npos;1;1,1\n", &mut v).unwrap_err()),
        2
    );
    let mut v = Vocabulary::new();
    assert_eq!(line_of(parse_dataset("pos;1;3,2\n", &mut v).unwrap_err()), 1);
    let mut v = Vocabulary::new();
    assert_eq!(line_of(parse_dataset("pos;1\n", &mut v).unwrap_err()), 1);
    let mut v = Vocabulary::new();
    assert_eq!(line_of(parse_dataset("pos;1;1,1\n# vars: x\n", &mut v).unwrap_err()), 2);
}

#[test]
fn csv_round_trips() {
    let config = ExperimentConfig {
        sample_sizes: vec![10, 20],
        runs: 2,
        noise: ratio(1, 10),
        ..ExperimentConfig::new("cube2")
    };
    let rows = run_experiment(&config).unwrap();
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "problem,dims,samples,run,seed,noise,outliers,estimate,true_optimum,feasible,found,runtime_ms,decide_calls"
    );
    let back = read_csv(&buf[..]).unwrap();
    assert_eq!(back, rows);
}
