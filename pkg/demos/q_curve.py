"""Information ratio Q_k for each regressor on an S curve embedded in R^4."""

from aamodels import Contiguity, GeneratorSpec, RegressorSpec, fit, generate, pca_oracle

X = generate(GeneratorSpec("s_shape", n=150, noise_sd=0.05, seed=2, ambient_p=4))
_, pca_q = pca_oracle(X, 4)

rows = {"pca": pca_q}
for kind in ("linear", "kernel", "spline"):
    model, _ = fit(X, 4, Contiguity(), RegressorSpec(kind))
    rows[kind] = model.q_curve

print("k  " + "".join(f"{name:>10}" for name in rows))
for k in range(5):
    print(f"{k}  " + "".join(f"{q[k]:10.4f}" for q in rows.values()))
