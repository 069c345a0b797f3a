use matchpyramid_core::baselines::TfIdfModel;
use matchpyramid_core::data::tokenize;

/// Dense tf-idf vectors over the fitted vocabulary, built independently.
fn dense(doc: &[String], vocab: &[String], docs: &[Vec<String>]) -> Vec<f64> {
    let n = docs.len() as f64;
    vocab
        .iter()
        .map(|term| {
            let tf = doc.iter().filter(|t| *t == term).count() as f64;
            let df = docs.iter().filter(|d| d.contains(term)).count() as f64;
            tf * (((1.0 + n) / (1.0 + df)).ln() + 1.0)
        })
        .collect()
}

#[test]
fn score_equals_dense_inner_product() {
    let docs: Vec<Vec<String>> =
        ["the cat sat on the mat", "the dog sat", "a cat and a dog"].iter().map(|s| tokenize(s)).collect();
    let model = TfIdfModel::fit(docs.iter().map(|d| d.as_slice())).unwrap();
    let mut vocab: Vec<String> = docs.concat();
    vocab.sort();
    vocab.dedup();
    assert_eq!(model.vocab_size(), vocab.len());
    let queries = [docs[0].clone(), docs[1].clone(), docs[2].clone(), tokenize("the cat and the unseen bird")];
    for a in &queries {
        for b in &queries {
            let (va, vb) = (dense(a, &vocab, &docs), dense(b, &vocab, &docs));
            let want: f64 = va.iter().zip(&vb).map(|(x, y)| x * y).sum();
            assert!((model.score(a, b) - want).abs() < 1e-12, "{a:?} / {b:?}");
        }
    }
}

#[test]
fn idf_of_term_in_one_of_three_docs() {
    let docs: Vec<Vec<String>> = ["x y", "y", "y z"].iter().map(|s| tokenize(s)).collect();
    let model = TfIdfModel::fit(docs.iter().map(|d| d.as_slice())).unwrap();
    assert!((model.idf("x") - 1.6931).abs() < 1e-4);
    assert_eq!(model.idf("y"), 1.0);
    assert!((model.idf("never") - (4.0f64.ln() + 1.0)).abs() < 1e-12);
}
