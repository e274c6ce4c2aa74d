"""Joints configurations, polynomial-method certificates and weight balancing."""
