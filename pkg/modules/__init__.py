# streamdrift - adaptive model-pool anomaly detection on drifting streams
# Module package
