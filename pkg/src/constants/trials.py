"""
Vemurafenib basket trial in BRAF V600 non-melanoma cancers.

Cohorts: non-small-cell lung cancer, colorectal cancer (vemurafenib alone and
with cetuximab), cholangiocarcinoma, Erdheim-Chester disease or Langerhans-cell
histiocytosis, anaplastic thyroid cancer.
"""

VEMURAFENIB_LABELS = ["NSCLC", "CRC-V", "CRC-VC", "CCA", "ECD/LCH", "ATC"]
VEMURAFENIB_N = [19, 10, 26, 8, 14, 7]
VEMURAFENIB_X = [8, 0, 1, 1, 6, 2]

VEMURAFENIB_PI_H0 = 0.15
VEMURAFENIB_PI_H1 = 0.35

# Upper bound of M (and the fixed M of BUPD-JS) used for this trial
VEMURAFENIB_M = 84.0
