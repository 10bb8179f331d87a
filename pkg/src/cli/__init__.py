# Command-line workflows and result serialisation
