use criterion::{black_box, criterion_group, criterion_main, Criterion};
use pubmark_core::eval::{pgd_attack, build_triples, AttackParams, Norm};
use pubmark_core::transforms::jpeg::jpeg_roundtrip;
use pubmark_core::{
    generate_image, lsb_detect, lsb_watermark, ref_embed, surrogate_gradient, CorpusSpec, Direction, Pgws,
    PgwsMessage, Rpws, SecretKey,
};

fn image() -> pubmark_core::Image {
    generate_image(&CorpusSpec::default(), 0)
}

fn hashing(c: &mut Criterion) {
    let img = image();
    let float = img.to_float();
    let other = pubmark_core::ref_surrogate(&generate_image(&CorpusSpec::default(), 1));
    c.bench_function("ref_embed 256x256", |b| b.iter(|| ref_embed(black_box(&img))));
    c.bench_function("surrogate_gradient 256x256", |b| {
        b.iter(|| surrogate_gradient(black_box(&float), Direction::Ascent, &other))
    });
}

fn channel(c: &mut Criterion) {
    let img = image();
    let pgws = Pgws::default();
    let m = PgwsMessage::new((0..pgws.capacity()).map(|i| i % 3 == 0).collect(), pgws.capacity()).unwrap();
    let marked = pgws.encode(&img, &m).unwrap();
    c.bench_function("pgws encode 256x256", |b| b.iter(|| pgws.encode(black_box(&img), &m).unwrap()));
    c.bench_function("pgws decode 256x256", |b| b.iter(|| pgws.decode(black_box(&marked)).unwrap()));
    c.bench_function("jpeg q90 256x256", |b| b.iter(|| jpeg_roundtrip(black_box(&img), 90)));
}

fn schemes(c: &mut Criterion) {
    let img = image();
    let sk = SecretKey::from_seed(1);
    let pk = sk.public_key();
    let lsb = lsb_watermark(&sk, &img).unwrap();
    let rpws = Rpws::default();
    let marked = rpws.watermark(&sk, &img).unwrap();
    c.bench_function("lsb watermark 256x256", |b| b.iter(|| lsb_watermark(&sk, black_box(&img)).unwrap()));
    c.bench_function("lsb detect 256x256", |b| b.iter(|| lsb_detect(&pk, black_box(&lsb))));
    c.bench_function("rpws watermark 256x256", |b| b.iter(|| rpws.watermark(&sk, black_box(&img)).unwrap()));
    c.bench_function("rpws detect 256x256", |b| b.iter(|| rpws.detect(&pk, black_box(&marked))));
}

fn attack(c: &mut Criterion) {
    let corpus: Vec<_> = (0..2).map(|i| generate_image(&CorpusSpec::default(), i)).collect();
    let triple = build_triples(&corpus, &[pubmark_core::TransformSpec::Jpeg { quality: 90 }], 0)
        .unwrap()
        .remove(0);
    let mut group = c.benchmark_group("pgd 20 steps 256x256");
    group.sample_size(10);
    for norm in [Norm::Linf, Norm::L1] {
        let p = AttackParams::with(norm, 8);
        group.bench_function(norm.as_str(), |b| b.iter(|| pgd_attack(black_box(&triple), &p)));
    }
    group.finish();
}

criterion_group!(benches, hashing, channel, schemes, attack);
criterion_main!(benches);
