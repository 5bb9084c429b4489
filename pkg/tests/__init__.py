# Test suite for streamdrift
