"""Endpoints package"""
