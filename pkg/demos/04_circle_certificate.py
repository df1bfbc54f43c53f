"""Certify a slope bound with M = 1 and inspect the stored certificate."""

from lurecert.iqc import log_grid
from lurecert.lti import validate_tf
from lurecert.multiplier import make_multiplier
from lurecert.search import bisect_alpha, certify, circle_baseline, replay_certificate

G = validate_tf([1], [1, 3, 2])
print("circle slope:", circle_baseline(G))

for alpha in (1.9, 2.1):
    cert = certify(G, alpha, make_multiplier(), "slope", log_grid())
    print(f"alpha={alpha}: {cert.verdict}, margin {cert.worst_margin:.4f} at w={cert.worst_omega}")

res = bisect_alpha(G, strategy="circle")
print(f"bisection: alpha* = {res.alpha_star:.5f} after {len(res.trace)} evaluations")
again = replay_certificate(res.certificate)
print("replayed verdict:", again.verdict, "margin diff:", again.worst_margin - res.certificate.worst_margin)
print(res.certificate.to_json()[:400], "...")
