# Trial simulation, cutoff calibration and operating characteristics
