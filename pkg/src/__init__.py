# Anosov Obstructions engine package
