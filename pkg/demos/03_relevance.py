"""Relevance filtering: keyword gate, classifier training, cross-validation."""

from newsmacro.relevance import evaluate_kfold, train_naive_bayes
from newsmacro.synthetic import synthesize_labeled_corpus

examples, vocab = synthesize_labeled_corpus(seed=0, n=1200)
positives = sum(e.label for e in examples)
print(f"corpus: {len(examples)} labelled articles, {positives} relevant, "
      f"{vocab.vocab_size - 1} known themes")

metrics = evaluate_kfold(examples, k=10, seed=0)
print(f"\n10-fold CV: precision {metrics.precision:.4f}  "
      f"recall {metrics.recall:.4f}  F1 {metrics.f1:.4f}")
print("per-fold F1:", [round(f, 3) for f in metrics.fold_scores])

model = train_naive_bayes(examples, vocab=vocab)
strongest = sorted(model.present_weight.items(),
                   key=lambda kv: -abs(kv[1]))[:6]
id_to_theme = {v: k for k, v in vocab.ids.items()}
print("\nmost informative themes (log-likelihood ratio when present):")
for token, weight in strongest:
    print(f"  {id_to_theme.get(token, '<unknown>'):32s} {weight:+.2f}")
