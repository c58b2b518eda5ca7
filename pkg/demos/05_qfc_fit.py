# # Fitting a frequency-conversion efficiency curve
#
# eta(P) = eta_max sin^2(pi/2 sqrt(P / P_m)), fitted to synthetic data with
# additive noise. The same CSV layout is accepted by `hybridrate fit-qfc`.

# %%
import numpy as np

from hybridrate.qfc import QfcMeasurement, fit_qfc, qfc_efficiency_model

rng = np.random.default_rng(2024)
P = np.linspace(0, 1200, 25)
truth = qfc_efficiency_model(P, 0.42, 480.0)
y = np.clip(truth + rng.normal(0, 0.01, P.size), 0, 1)
data = [QfcMeasurement(float(a), float(b), 0.01) for a, b in zip(P, y)]

# %%
fit = fit_qfc(data)
print(f"eta = {fit.eta:.4f} (true 0.42), P_m = {fit.p_m:.1f} mW (true 480)")
print(f"residual norm {fit.residual_norm:.3f}, {fit.iterations} iterations, converged={fit.converged}")

# %%
print(f"\n{'P mW':>7} {'data':>7} {'fit':>7}")
for a, b in zip(P[::3], y[::3]):
    print(f"{a:7.0f} {b:7.4f} {qfc_efficiency_model(a, fit.eta, fit.p_m):7.4f}")
