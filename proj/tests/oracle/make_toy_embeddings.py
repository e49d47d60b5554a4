"""Writes tests/data/toy_embeddings.txt: 8-d vectors for the toy corpus vocabulary.

Tokens come from the hand-tokenized reference, not from the library tokenizer.
A handful of words are deliberately left out so the corpus exercises
out-of-vocabulary handling.
"""
import pathlib
import numpy as np

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"
OOV = {"zzzqx", "um", "mm", "hmm", "whatever"}

def main():
    vocab = []
    for line in (DATA / "toy_tokens.txt").read_text().splitlines():
        for tok in line.split():
            if tok not in OOV and tok not in vocab:
                vocab.append(tok)
    vocab.append("Paris")  # mixed case entry: never matched by lowercased tokens
    rng = np.random.default_rng(7)
    dim = 8
    lines = [f"{len(vocab)} {dim}"]
    for word in vocab:
        vec = np.round(rng.normal(size=dim), 4)
        lines.append(word + " " + " ".join(f"{v:.4f}" for v in vec))
    (DATA / "toy_embeddings.txt").write_text("\n".join(lines) + "\n")

if __name__ == "__main__":
    main()
