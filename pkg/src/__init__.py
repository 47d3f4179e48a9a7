# Lie order toolkit package
